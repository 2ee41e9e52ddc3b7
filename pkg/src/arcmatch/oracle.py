"""Reference answers that share no code with the engine.

* :func:`embed_exists` searches for an embedding by backtracking straight
  from the definition (base match, two-way arc match, order).
* :func:`gamma_def` finds the longest embeddable prefix by trying every
  candidate prefix end with :func:`embed_exists`.
* :func:`gamma_rec` evaluates the recurrence top-down with memoization.

All three are meant for small inputs only.
"""

from __future__ import annotations

import sys
from functools import lru_cache
from itertools import product
from typing import Union

from .arcstr import ArcAnnotatedString, SubstringView, is_arc_preserving_split, substring_view
from .errors import InstanceTooLarge

__all__ = [
    "MAX_TEXT",
    "embed_exists",
    "find_embedding",
    "is_embedding",
    "gamma_def",
    "gamma_rec",
    "Recurrence",
    "split_composition_violations",
]

MAX_TEXT = 24

StringLike = Union[ArcAnnotatedString, SubstringView]


def _tables(S: StringLike) -> tuple[str, list[int]]:
    """1-based bases (index 0 padded) and local partner list (0 = unpaired)."""
    n = len(S)
    partner = [0] * (n + 1)
    for il, ir in S.arcs:
        partner[il] = ir
        partner[ir] = il
    return " " + S.bases, partner


def is_embedding(P: StringLike, Q: StringLike, f: dict[int, int] | list[int]) -> bool:
    """Check the three embedding conditions for a map ``j -> f[j]``."""
    m = len(P)
    if isinstance(f, list):
        f = {j + 1: v for j, v in enumerate(f)}
    if sorted(f) != list(range(1, m + 1)):
        return False
    image = [f[j] for j in range(1, m + 1)]
    if any(not 1 <= i <= len(Q) for i in image):
        return False
    if any(a >= b for a, b in zip(image, image[1:])):
        return False
    if any(P[j] != Q[f[j]] for j in range(1, m + 1)):
        return False
    p_arcs = set(P.arcs)
    q_arcs = set(Q.arcs)
    for jl in range(1, m + 1):
        for jr in range(jl + 1, m + 1):
            if ((jl, jr) in p_arcs) != ((f[jl], f[jr]) in q_arcs):
                return False
    return True


def find_embedding(P: StringLike, Q: StringLike, *, cap: int = MAX_TEXT) -> list[int] | None:
    """An embedding ``[f(1), ..., f(m)]`` of ``P`` in ``Q``, or ``None``."""
    n = len(Q)
    if n > cap:
        raise InstanceTooLarge(f"text length {n} exceeds oracle cap {cap}")
    pb, pp = _tables(P)
    qb, qp = _tables(Q)
    m = len(P)
    f = [0] * (m + 1)
    used_by = [0] * (n + 1)

    def place(j: int, lo: int) -> bool:
        if j > m:
            return True
        pj = pp[j]
        for i in range(lo, n - (m - j) + 1):
            if pb[j] != qb[i]:
                continue
            qi = qp[i]
            if 0 < pj < j:
                # closing an arc: must land on the partner of the opener's image
                if qp[f[pj]] != i:
                    continue
            else:
                if 0 < qi < i and used_by[qi]:
                    continue
                if pj > j and qi <= i:
                    continue
            f[j] = i
            used_by[i] = j
            if place(j + 1, i + 1):
                return True
            used_by[i] = 0
        return False

    if place(1, 1):
        return f[1:]
    return None


def embed_exists(P: StringLike, Q: StringLike, *, cap: int = MAX_TEXT) -> bool:
    return find_embedding(P, Q, cap=cap) is not None


def _splits_cleanly(P: ArcAnnotatedString, j1: int, j2: int, k: int) -> bool:
    return is_arc_preserving_split(substring_view(P, j1, j2), k - j1 + 1)


def gamma_def(
    P: ArcAnnotatedString, Q: ArcAnnotatedString, j1: int, j2: int, i1: int, i2: int, *, cap: int = MAX_TEXT
) -> int:
    """Largest ``k`` such that ``k`` splits ``P[j1, j2]`` cleanly and ``P[j1, k]`` embeds in ``Q[i1, i2]``."""
    if j1 > j2:
        return j1 - 1
    text = substring_view(Q, i1, i2)
    if len(text) > cap:
        raise InstanceTooLarge(f"text length {len(text)} exceeds oracle cap {cap}")
    for k in range(j2, j1 - 1, -1):
        if _splits_cleanly(P, j1, j2, k) and embed_exists(substring_view(P, j1, k), text, cap=cap):
            return k
    return j1 - 1


class Recurrence:
    """Memoized top-down evaluation of the gamma recurrence for one (P, Q) pair."""

    def __init__(self, P: ArcAnnotatedString, Q: ArcAnnotatedString):
        pb, pp = _tables(P)
        qb, qp = _tables(Q)

        @lru_cache(maxsize=None)
        def gamma(j1: int, j2: int, i1: int, i2: int) -> int:
            if j1 > j2 or i1 > i2:
                return j1 - 1
            jr = pp[j1]
            p_opens = j1 < jr <= j2
            same = pb[j1] == qb[i1]
            if i1 == i2:
                return j1 if same and not p_opens else j1 - 1
            ir = qp[i1]
            if not i1 < ir <= i2:
                if same and not p_opens:
                    return gamma(j1 + 1, j2, i1 + 1, i2)
                return gamma(j1, j2, i1 + 1, i2)
            if ir < i2:
                return gamma(gamma(j1, j2, i1, ir) + 1, j2, ir + 1, i2)
            if not p_opens:
                return max(gamma(j1, j2, i1 + 1, i2), gamma(j1, j2, i1, i2 - 1))
            if not same or pb[jr] != qb[i2]:
                return gamma(j1, j2, i1 + 1, i2)
            inner = gamma(j1 + 1, jr - 1, i1 + 1, i2 - 1)
            phi = jr if inner == jr - 1 else j1 - 1
            return max(phi, gamma(j1, j2, i1 + 1, i2))

        self.gamma = gamma

    @property
    def evaluated(self) -> int:
        """Number of distinct tuples evaluated so far."""
        return self.gamma.cache_info().currsize


def gamma_rec(P: ArcAnnotatedString, Q: ArcAnnotatedString, j1: int, j2: int, i1: int, i2: int) -> int:
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20 * (len(P) + len(Q)) + 1000))
    try:
        return Recurrence(P, Q).gamma(j1, j2, i1, i2)
    finally:
        sys.setrecursionlimit(limit)


def split_composition_violations(P: ArcAnnotatedString, Q: ArcAnnotatedString) -> list[str]:
    """Check that embeddings compose and decompose across clean splits.

    (ii) clean splits of both strings whose halves embed pairwise give an
    embedding of the whole; (i) an embedding of the whole yields such a
    split of ``P`` for every clean split of ``Q``.
    """
    m, n = len(P), len(Q)
    whole = embed_exists(P, Q)
    problems = []
    q_splits = [i for i in range(n + 1) if is_arc_preserving_split(Q, i)]
    p_splits = [j for j in range(m + 1) if is_arc_preserving_split(P, j)]
    for i, j in product(q_splits, p_splits):
        left = embed_exists(substring_view(P, 1, j), substring_view(Q, 1, i))
        right = embed_exists(substring_view(P, j + 1, m), substring_view(Q, i + 1, n))
        if left and right and not whole:
            problems.append(f"(ii) fails at P-split {j}, Q-split {i}")
    if whole:
        for i in q_splits:
            ok = any(
                embed_exists(substring_view(P, 1, j), substring_view(Q, 1, i))
                and embed_exists(substring_view(P, j + 1, m), substring_view(Q, i + 1, n))
                for j in p_splits
            )
            if not ok:
                problems.append(f"(i) fails at Q-split {i}")
    return problems
