"""Gamma sequences and the four primitives that build them.

For a pattern ``P`` of length ``m`` and an interval ``[i1, i2]`` of the text
``Q``, the Gamma sequence holds, for every suffix start ``j1``, the largest
``k`` such that ``P[j1, k]`` is an arc-preserving subsequence of
``Q[i1, i2]`` and ``k`` splits ``P[j1, m]`` without cutting an arc.

Storage is a 0-based ``int32`` array: ``values[t]`` is the entry for
``j1 = t + 1``.  The entry for ``j1 = m + 1`` is the implicit constant ``m``.

The ``_``-prefixed functions are numba kernels shared with the engine; the
public functions wrap them with precondition checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit

from .arcstr import ArcAnnotatedString
from .errors import IntervalMismatch, OutOfRange, PreconditionViolated

__all__ = [
    "GammaSeq",
    "PatternContext",
    "init_single",
    "init_empty",
    "extend",
    "combine",
    "meld",
]


# ---------------------------------------------------------------- kernels


@njit(cache=True, inline="always")
def _at(g, t, m):
    return m if t >= m else g[t]


@njit(cache=True)
def _init_single(row, out):
    for t in range(out.shape[0]):
        out[t] = t + 1 if row[t] else t


@njit(cache=True)
def _init_empty(out):
    for t in range(out.shape[0]):
        out[t] = t


@njit(cache=True)
def _extend_inplace(g, row):
    # ascending t reads g[t + 1] before it is overwritten
    m = g.shape[0]
    for t in range(m - 1):
        if row[t]:
            g[t] = g[t + 1]
    if row[m - 1]:
        g[m - 1] = m


@njit(cache=True)
def _extend_run(g, mask, qcodes, hi, lo):
    """Extend leftwards over text positions ``hi, hi-1, ..., lo``."""
    for i in range(hi, lo - 1, -1):
        _extend_inplace(g, mask[qcodes[i]])


@njit(cache=True)
def _combine(left, right, out):
    m = out.shape[0]
    for t in range(m):
        x = left[t]
        out[t] = m if x >= m else right[x]


@njit(cache=True)
def _meld(ga, gb, gc, gc_empty, left_partner, pcodes, qa, qb, out, flip_phi):
    m = out.shape[0]
    for t in range(m):
        a = ga[t]
        jr = left_partner[t]
        if jr == 0:
            b = gb[t]
            out[t] = a if a >= b else b
        elif pcodes[t] != qa or pcodes[jr - 1] != qb:
            out[t] = a
        else:
            inner = t + 1 if gc_empty else gc[t + 1]
            fits = inner >= jr - 1
            if flip_phi:
                fits = not fits
            phi = jr if fits else t
            out[t] = phi if phi >= a else a


@njit(cache=True)
def _is_monotone(g):
    m = g.shape[0]
    for t in range(m):
        nxt = m if t + 1 >= m else g[t + 1]
        if g[t] < t or g[t] > nxt:
            return False
    return True


# ---------------------------------------------------------------- types


@dataclass(frozen=True, eq=False)
class GammaSeq:
    """Gamma sequence of ``P`` against ``Q[i1, i2]``; ``i1 = i2 + 1`` is empty."""

    values: np.ndarray
    i1: int
    i2: int

    @property
    def m(self) -> int:
        return int(self.values.shape[0])

    @property
    def interval(self) -> tuple[int, int]:
        return self.i1, self.i2

    @property
    def is_empty_interval(self) -> bool:
        return self.i1 > self.i2

    def __getitem__(self, j1: int) -> int:
        m = self.m
        if j1 == m + 1:
            return m
        if not 1 <= j1 <= m:
            raise OutOfRange(f"j1={j1} outside [1, {m + 1}]")
        return int(self.values[j1 - 1])

    def __len__(self) -> int:
        return self.m

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GammaSeq):
            return NotImplemented
        return self.interval == other.interval and np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"GammaSeq({self.values.tolist()}, interval=({self.i1}, {self.i2}))"

    def tolist(self) -> list[int]:
        """Entries for ``j1 = 1 .. m``."""
        return self.values.tolist()

    def descending(self) -> list[int]:
        """Entries ordered ``j1 = m, m-1, ..., 1``."""
        return self.values[::-1].tolist()

    def is_monotone(self) -> bool:
        return bool(_is_monotone(self.values))

    @classmethod
    def from_values(cls, values, i1: int = 1, i2: int = 0) -> "GammaSeq":
        return cls(np.ascontiguousarray(values, dtype=np.int32), i1, i2)


def _symbol_codes(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32)


class PatternContext:
    """Per-pattern lookup tables.

    ``codes[t]`` numbers the symbol of ``P[t + 1]`` (1-based symbol ids);
    text symbols absent from ``P`` map to 0.  ``mask[c, t]`` is set when
    ``P[t + 1]`` has code ``c`` and does not open an arc.  ``left_partner[t]``
    is the right endpoint of the arc opened at ``t + 1``, or 0.
    """

    def __init__(self, P: ArcAnnotatedString):
        if len(P) == 0:
            raise ValueError("pattern must be non-empty")
        self.P = P
        m = len(P)
        self.m = m
        ords = _symbol_codes(P.bases)
        self.alphabet = np.unique(ords)
        self.codes = (np.searchsorted(self.alphabet, ords) + 1).astype(np.int32)
        partner = np.asarray(P.partner[1:], dtype=np.int32)
        positions = np.arange(1, m + 1, dtype=np.int32)
        self.left_partner = np.where(partner > positions, partner, 0).astype(np.int32)
        opens = self.left_partner > 0
        self.mask = np.zeros((len(self.alphabet) + 1, m), dtype=np.uint8)
        self.mask[self.codes, np.arange(m)] = ~opens
        for arr in (self.codes, self.left_partner, self.mask):
            arr.setflags(write=False)

    @property
    def partner(self) -> np.ndarray:
        return self.P.partner

    def code_of(self, symbol: str) -> int:
        o = ord(symbol)
        k = int(np.searchsorted(self.alphabet, o))
        if k < len(self.alphabet) and self.alphabet[k] == o:
            return k + 1
        return 0

    def text_codes(self, Q: ArcAnnotatedString) -> np.ndarray:
        """Codes of ``Q`` indexed by 1-based position (slot 0 is unused)."""
        ords = _symbol_codes(Q.bases)
        k = np.searchsorted(self.alphabet, ords)
        k_clip = np.minimum(k, len(self.alphabet) - 1)
        hit = self.alphabet[k_clip] == ords
        out = np.zeros(len(Q) + 1, dtype=np.int32)
        out[1:] = np.where(hit, k_clip + 1, 0)
        return out

    @cached_property
    def is_left(self) -> np.ndarray:
        return self.left_partner > 0


# ---------------------------------------------------------------- primitives


def _debug_check(g: GammaSeq) -> GammaSeq:
    assert g.is_monotone(), f"monotonicity violated: {g!r}"
    return g


def init_single(ctx: PatternContext, Q: ArcAnnotatedString, i: int) -> GammaSeq:
    """Gamma sequence for the one-base interval ``[i, i]``."""
    if not 1 <= i <= len(Q):
        raise OutOfRange(f"position {i} outside [1, {len(Q)}]")
    out = np.empty(ctx.m, np.int32)
    _init_single(ctx.mask[ctx.code_of(Q[i])], out)
    return _debug_check(GammaSeq(out, i, i))


def init_empty(m: int, boundary: int = 1) -> GammaSeq:
    """Gamma sequence for the empty interval ``[boundary, boundary - 1]``."""
    out = np.empty(m, np.int32)
    _init_empty(out)
    return GammaSeq(out, boundary, boundary - 1)


def extend(
    ctx: PatternContext, Q: ArcAnnotatedString, g: GammaSeq, i1: int, *, inplace: bool = False
) -> GammaSeq:
    """Gamma for ``[i1, i2]`` from ``g`` over ``[i1 + 1, i2]``.

    ``i1`` must not open an arc closing inside the interval.  With
    ``inplace`` the caller hands over ``g``'s buffer.
    """
    if g.i1 != i1 + 1:
        raise IntervalMismatch(f"cannot extend interval {g.interval} at {i1}")
    if not 1 <= i1 <= len(Q):
        raise OutOfRange(f"position {i1} outside [1, {len(Q)}]")
    p = int(Q.partner[i1])
    if i1 < p <= g.i2:
        raise PreconditionViolated(f"position {i1} opens arc ({i1}, {p}) inside [{i1}, {g.i2}]")
    vals = g.values if inplace else g.values.copy()
    _extend_inplace(vals, ctx.mask[ctx.code_of(Q[i1])])
    return _debug_check(GammaSeq(vals, i1, g.i2))


def combine(g_left: GammaSeq, g_right: GammaSeq, Q: ArcAnnotatedString | None = None) -> GammaSeq:
    """Gamma for ``[i1, i2]`` from ``[i1, ir]`` and ``[ir + 1, i2]``.

    When ``Q`` is given the left interval must be exactly an arc of ``Q``.
    """
    if g_left.m != g_right.m or g_left.i2 + 1 != g_right.i1:
        raise IntervalMismatch(f"intervals {g_left.interval} and {g_right.interval} do not abut")
    if Q is not None and not Q.has_arc(g_left.i1, g_left.i2):
        raise IntervalMismatch(f"{g_left.interval} is not an arc of the text")
    out = np.empty(g_left.m, np.int32)
    _combine(g_left.values, g_right.values, out)
    return _debug_check(GammaSeq(out, g_left.i1, g_right.i2))


def meld(
    ctx: PatternContext,
    Q: ArcAnnotatedString,
    g_a: GammaSeq,
    g_b: GammaSeq,
    g_c: GammaSeq,
    arc: tuple[int, int],
    *,
    flip_phi: bool = False,
) -> GammaSeq:
    """Gamma for an arc ``(i1, i2)`` of ``Q`` from the three inner intervals.

    ``g_a`` covers ``[i1 + 1, i2]``, ``g_b`` covers ``[i1, i2 - 1]`` and
    ``g_c`` covers ``[i1 + 1, i2 - 1]`` (empty when ``i2 = i1 + 1``).
    ``flip_phi`` deliberately breaks the arc-to-arc test (mutation testing).
    """
    i1, i2 = arc
    if not Q.has_arc(i1, i2):
        raise IntervalMismatch(f"({i1}, {i2}) is not an arc of the text")
    expected = ((i1 + 1, i2), (i1, i2 - 1), (i1 + 1, i2 - 1))
    got = (g_a.interval, g_b.interval, g_c.interval)
    if got != expected:
        raise IntervalMismatch(f"meld operands cover {got}, expected {expected}")
    out = np.empty(ctx.m, np.int32)
    _meld(
        g_a.values,
        g_b.values,
        g_c.values,
        g_c.is_empty_interval,
        ctx.left_partner,
        ctx.codes,
        ctx.code_of(Q[i1]),
        ctx.code_of(Q[i2]),
        out,
        flip_phi,
    )
    return _debug_check(GammaSeq(out, i1, i2))
