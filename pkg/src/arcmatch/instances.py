"""Deterministic random and exhaustive instance generators."""

from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Iterator

import numpy as np

from .arcstr import ArcAnnotatedString, parse_dotbracket

DEFAULT_ALPHABET = "ACGU"


def random_structure(n: int, n_arcs: int, rng: np.random.Generator) -> str:
    """Dot-bracket string with ``n_arcs`` nested arcs on ``n`` positions.

    Equivalent to inserting nested pairs one at a time into uniformly random
    gaps: pick the bracket positions, then a uniformly random pairing of
    them, with the earlier member of each pair opening.
    """
    n_arcs = max(0, min(n_arcs, n // 2))
    out = np.full(n, ord("."), dtype=np.uint8)
    if n_arcs:
        slots = np.sort(rng.choice(n, 2 * n_arcs, replace=False))
        pairs = rng.permutation(2 * n_arcs).reshape(n_arcs, 2)
        opens = np.zeros(2 * n_arcs, dtype=bool)
        opens[pairs.min(axis=1)] = True
        out[slots[opens]] = ord("(")
        out[slots[~opens]] = ord(")")
    return out.tobytes().decode("ascii")


def random_bases(n: int, rng: np.random.Generator, alphabet: str = DEFAULT_ALPHABET) -> str:
    symbols = np.array(list(alphabet))
    return "".join(symbols[rng.integers(0, len(alphabet), n)].tolist())


def random_string(
    n: int,
    rng: np.random.Generator,
    *,
    n_arcs: int | None = None,
    alphabet: str = DEFAULT_ALPHABET,
) -> ArcAnnotatedString:
    if n_arcs is None:
        n_arcs = int(rng.integers(0, n // 2 + 1))
    return parse_dotbracket(random_bases(n, rng, alphabet), random_structure(n, n_arcs, rng))


def random_subsequence(Q: ArcAnnotatedString, m: int, rng: np.random.Generator) -> ArcAnnotatedString:
    """Keep ``m`` random positions of ``Q`` together with the arcs they fully contain."""
    n = len(Q)
    keep = np.sort(rng.choice(n, m, replace=False)) + 1
    renumber = np.zeros(n + 1, dtype=np.int32)
    renumber[keep] = np.arange(1, m + 1, dtype=np.int32)
    partner = np.zeros(m + 1, dtype=np.int32)
    partner[1:] = renumber[Q.partner[keep]]
    bases = "".join(Q.bases[i - 1] for i in keep.tolist())
    return ArcAnnotatedString(bases, partner)


def mutate_base(S: ArcAnnotatedString, rng: np.random.Generator, alphabet: str = DEFAULT_ALPHABET) -> ArcAnnotatedString:
    if len(S) == 0:
        return S
    k = int(rng.integers(0, len(S)))
    ch = alphabet[int(rng.integers(0, len(alphabet)))]
    return ArcAnnotatedString(S.bases[:k] + ch + S.bases[k + 1 :], S.partner.copy())


def random_instance(
    rng: np.random.Generator,
    max_m: int,
    max_n: int,
    *,
    alphabet: str = DEFAULT_ALPHABET,
) -> tuple[ArcAnnotatedString, ArcAnnotatedString]:
    """A pattern/text pair; roughly half the patterns are cut from the text."""
    n = int(rng.integers(1, max_n + 1))
    Q = random_string(n, rng, alphabet=alphabet)
    style = rng.random()
    if style < 0.5:
        m = int(rng.integers(0, min(max_m, n) + 1))
        P = random_subsequence(Q, m, rng)
        if style < 0.2:
            P = mutate_base(P, rng, alphabet)
    else:
        m = int(rng.integers(0, max_m + 1))
        P = random_string(m, rng, alphabet=alphabet)
    return P, Q


def bench_instance(
    m: int, n: int, seed: int, *, arc_fraction: float = 0.25, alphabet: str = DEFAULT_ALPHABET
) -> tuple[ArcAnnotatedString, ArcAnnotatedString]:
    """Text with ``arc_fraction * n`` arcs and a pattern cut from it."""
    rng = np.random.default_rng(seed)
    Q = random_string(n, rng, n_arcs=int(arc_fraction * n), alphabet=alphabet)
    return random_subsequence(Q, min(m, n), rng), Q


@lru_cache(maxsize=None)
def all_structures(length: int) -> tuple[str, ...]:
    """Every dot-bracket string of the given length."""
    if length == 0:
        return ("",)
    out = [("." + rest) for rest in all_structures(length - 1)]
    # first position opens an arc closing at position k
    for k in range(2, length + 1):
        for inner in all_structures(k - 2):
            for rest in all_structures(length - k):
                out.append("(" + inner + ")" + rest)
    return tuple(out)


def all_strings(max_len: int, alphabet: str = "AU") -> Iterator[ArcAnnotatedString]:
    """Every nested arc-annotated string of length ``0 .. max_len``."""
    for length in range(max_len + 1):
        structures = all_structures(length)
        for letters in product(alphabet, repeat=length):
            bases = "".join(letters)
            for struct in structures:
                yield parse_dotbracket(bases, struct)
