"""Heavy-path-first traversal computing the Gamma sequence of the whole text.

The traversal runs inside one numba kernel with an explicit frame stack, so
arbitrarily deep arc nestings never touch the native call stack.  Gamma
sequences live in two fixed pools sized from the maximum light depth:

* a raw pool of ``int32[m]`` rows, and
* a compressed pool of interleaved V/U words plus their rank/select index.

Modes
-----
``uncompressed``            retained sequences stay raw.
``compress-decompress``     retained sequences are encoded before every light
                            child call and decoded right after it returns.
``compress-random-access``  retained sequences are encoded once; combines read
                            them element-wise through rank/select.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np
from numba import njit

from . import arctree
from .arcstr import ArcAnnotatedString, wrap
from .gamma import (
    GammaSeq,
    PatternContext,
    _combine,
    _extend_inplace,
    _extend_run,
    _init_single,
    _is_monotone,
    _meld,
)
from .succinct import (
    BLOCK_WORDS,
    SAMPLE_RATE,
    _access,
    _decode_into,
    _encode_into,
    _fill_rank,
    _fill_select,
    _popcount,
)

__all__ = [
    "MODES",
    "EngineConfig",
    "EngineStats",
    "NapsResult",
    "PreparedText",
    "prepare_text",
    "naps",
    "naps_prepared",
    "longest_prefix",
]

MODES = ("uncompressed", "compress-decompress", "compress-random-access")

# handle kinds
_NONE = 0
_RAW = 1
_COMP = 2
_EMPTY = 3

# stats slots
_S_INIT, _S_EXTEND, _S_COMBINE, _S_MELD = 0, 1, 2, 3
_S_ENCODE, _S_DECODE, _S_ACCESS = 4, 5, 6
_S_LIVE, _S_PEAK_LIVE, _S_HELD_BITS, _S_PEAK_BITS = 7, 8, 9, 10
_S_AUDITED, _S_ENVELOPE_BAD = 11, 12
_N_STATS = 13


# ---------------------------------------------------------------- pool helpers


@njit(cache=True)
def _alloc(free, top, stats):
    if top[0] == 0:
        raise RuntimeError("Gamma pool exhausted")
    top[0] -= 1
    stats[_S_LIVE] += 1
    if stats[_S_LIVE] > stats[_S_PEAK_LIVE]:
        stats[_S_PEAK_LIVE] = stats[_S_LIVE]
    return free[top[0]]


@njit(cache=True)
def _release(free, top, slot, stats):
    free[top[0]] = slot
    top[0] += 1
    stats[_S_LIVE] -= 1


@njit(cache=True)
def _check(g, debug):
    if debug and not _is_monotone(g):
        raise ValueError("Gamma sequence lost monotonicity")


@njit(cache=True)
def _envelope_ok(g, vu, nbits, scratch):
    # length, popcounts and round trip of one encoding
    m = g.shape[0]
    if nbits > 2 * m + 1:
        return False
    nw = (nbits + 63) // 64
    ones_v = 0
    ones_u = 0
    for w in range(nw):
        ones_v += _popcount(vu[w, 0])
        ones_u += _popcount(vu[w, 1])
    if ones_v > m + 1 or ones_u != m:
        return False
    if _decode_into(vu, nbits, scratch) != 0:
        return False
    for t in range(m):
        if scratch[t] != g[t]:
            return False
    return True


@njit(cache=True)
def _get(kind, slot, x, raw, cvu, cnw, ccv, ccu, csu, cns, m, stats):
    # entry at 0-based index x (x == m is the implicit sentinel)
    if x >= m:
        return m
    if kind == _RAW:
        return raw[slot, x]
    if kind == _EMPTY:
        return x
    stats[_S_ACCESS] += 1
    return _access(cvu[slot], cnw, ccv[slot], ccu[slot], csu[slot], cns[slot], m, x + 1)


@njit(cache=True)
def _traverse(
    mode, mask, left_partner, pcodes, qcodes,
    left, right, child_ptr, child_ids, heavy,
    raw_cap, comp_cap, debug, flip_phi, stats,
):
    m = mask.shape[1]
    n_arcs = left.shape[0]
    indexed = mode == 2

    raw = np.empty((raw_cap, m), np.int32)
    raw_free = np.arange(raw_cap).astype(np.int32)
    raw_top = np.array([raw_cap], np.int64)

    cnw = max(1, (2 * m + 1 + 63) // 64)
    cnb = (cnw + BLOCK_WORDS - 1) // BLOCK_WORDS
    cap_c = comp_cap if mode != 0 else 1
    cvu = np.zeros((cap_c, cnw, 2), np.uint64)
    cnbits = np.zeros(cap_c, np.int64)
    ccv = np.zeros((cap_c, cnb + 1), np.int32)
    ccu = np.zeros((cap_c, cnb + 1), np.int32)
    csu = np.zeros((cap_c, m // SAMPLE_RATE + 2), np.int32)
    cns = np.zeros(cap_c, np.int64)
    comp_free = np.arange(cap_c).astype(np.int32)
    comp_top = np.array([cap_c], np.int64)

    raw_bits = 32 * m
    scratch = np.empty(m, np.int32)
    index_bits = 2 * (cnb + 1) * 32

    # frame stack
    f_arc = np.empty(n_arcs, np.int32)
    f_state = np.empty(n_arcs, np.int8)
    f_k = np.empty(n_arcs, np.int32)
    f_bits = np.zeros(n_arcs, np.int64)
    # three retained handles per frame: heavy result, Gamma(., ir), Gamma(., ir - 1)
    h_kind = np.zeros((n_arcs, 3), np.int8)
    h_slot = np.zeros((n_arcs, 3), np.int32)

    sp = 0
    f_arc[0] = 0
    f_state[0] = 0
    ret = -1
    ret_kind = _NONE

    while sp >= 0:
        a = f_arc[sp]
        il = left[a]
        ir = right[a]
        st = f_state[sp]
        first = child_ptr[a]
        s = child_ptr[a + 1] - first

        if st == 0:
            if s > 0:
                f_state[sp] = 1
                sp += 1
                f_arc[sp] = heavy[a]
                f_state[sp] = 0
                continue
            # leaf arc
            r1 = _alloc(raw_free, raw_top, stats)
            _init_single(mask[qcodes[ir]], raw[r1])
            r2 = _alloc(raw_free, raw_top, stats)
            _init_single(mask[qcodes[ir - 1]], raw[r2])
            stats[_S_INIT] += 2
            if ir == il + 1:
                ga = r1
                gb = r2
                gc = r2
                gc_empty = True
            else:
                _extend_run(raw[r1], mask, qcodes, ir - 1, il + 1)
                _extend_run(raw[r2], mask, qcodes, ir - 2, il + 1)
                ga = r1
                gc = r2
                gc_empty = False
                gb = _alloc(raw_free, raw_top, stats)
                raw[gb, :] = raw[gc, :]
                _extend_inplace(raw[gb], mask[qcodes[il]])
                stats[_S_EXTEND] += (ir - 1 - il) + (ir - 2 - il) + 1
                _check(raw[ga], debug)
                _check(raw[gb], debug)
                _check(raw[gc], debug)
            out = _alloc(raw_free, raw_top, stats)
            _meld(raw[ga], raw[gb], raw[gc], gc_empty, left_partner, pcodes,
                  qcodes[il], qcodes[ir], raw[out], flip_phi)
            stats[_S_MELD] += 1
            _check(raw[out], debug)
            _release(raw_free, raw_top, ga, stats)
            _release(raw_free, raw_top, gb, stats)
            if not gc_empty:
                _release(raw_free, raw_top, gc, stats)
            ret = out
            ret_kind = _RAW
            sp -= 1
            continue

        if st == 1:
            # heavy child done: start the local sequences at ir and ir - 1
            h_kind[sp, 0] = ret_kind
            h_slot[sp, 0] = ret
            rs = right[child_ids[first + s - 1]]
            lr = _alloc(raw_free, raw_top, stats)
            _init_single(mask[qcodes[ir]], raw[lr])
            stats[_S_INIT] += 2
            h_kind[sp, 1] = _RAW
            h_slot[sp, 1] = lr
            if rs + 1 <= ir - 1:
                l1 = _alloc(raw_free, raw_top, stats)
                _init_single(mask[qcodes[ir - 1]], raw[l1])
                _extend_run(raw[lr], mask, qcodes, ir - 1, rs + 1)
                _extend_run(raw[l1], mask, qcodes, ir - 2, rs + 1)
                stats[_S_EXTEND] += (ir - 1 - rs) + (ir - 2 - rs)
                h_kind[sp, 2] = _RAW
                h_slot[sp, 2] = l1
                _check(raw[l1], debug)
            else:
                h_kind[sp, 2] = _EMPTY
            _check(raw[lr], debug)
            f_k[sp] = s - 1
            f_state[sp] = 2
            continue

        k = f_k[sp]
        c = child_ids[first + k]

        if st == 2:
            if c != heavy[a]:
                # light child: park the retained sequences, then descend
                held = 0
                for q in range(3):
                    kind = h_kind[sp, q]
                    if kind == _RAW and mode != 0:
                        src = h_slot[sp, q]
                        cs = _alloc(comp_free, comp_top, stats)
                        cvu[cs, :, :] = 0
                        nb = _encode_into(raw[src], cvu[cs])
                        if nb < 0:
                            raise ValueError("encoder rejected a Gamma sequence")
                        cnbits[cs] = nb
                        if debug:
                            stats[_S_AUDITED] += 1
                            if not _envelope_ok(raw[src], cvu[cs], nb, scratch):
                                stats[_S_ENVELOPE_BAD] += 1
                        if indexed:
                            _fill_rank(cvu[cs, :, 0], cnw, ccv[cs])
                            _fill_rank(cvu[cs, :, 1], cnw, ccu[cs])
                            cns[cs] = _fill_select(ccu[cs], cnb, m, csu[cs])
                        stats[_S_ENCODE] += 1
                        _release(raw_free, raw_top, src, stats)
                        h_kind[sp, q] = _COMP
                        h_slot[sp, q] = cs
                        kind = _COMP
                    if kind == _RAW:
                        held += raw_bits
                    elif kind == _COMP:
                        cs = h_slot[sp, q]
                        held += 2 * cnbits[cs]
                        if indexed:
                            held += index_bits + 32 * cns[cs]
                f_bits[sp] = held
                stats[_S_HELD_BITS] += held
                if stats[_S_HELD_BITS] > stats[_S_PEAK_BITS]:
                    stats[_S_PEAK_BITS] = stats[_S_HELD_BITS]
                f_state[sp] = 3
                sp += 1
                f_arc[sp] = c
                f_state[sp] = 0
                continue
            r_kind = h_kind[sp, 0]
            r_slot = h_slot[sp, 0]
            h_kind[sp, 0] = _NONE
        else:
            # st == 3: light child returned
            stats[_S_HELD_BITS] -= f_bits[sp]
            if mode == 1:
                for q in range(3):
                    if h_kind[sp, q] == _COMP:
                        cs = h_slot[sp, q]
                        dst = _alloc(raw_free, raw_top, stats)
                        if _decode_into(cvu[cs], cnbits[cs], raw[dst]) != 0:
                            raise ValueError("decoder rejected an encoding")
                        stats[_S_DECODE] += 1
                        _release(comp_free, comp_top, cs, stats)
                        h_kind[sp, q] = _RAW
                        h_slot[sp, q] = dst
            r_kind = ret_kind
            r_slot = ret

        # combine the child's Gamma with both local sequences
        for q in range(1, 3):
            kind = h_kind[sp, q]
            slot = h_slot[sp, q]
            out = _alloc(raw_free, raw_top, stats)
            if r_kind == _RAW and kind == _RAW:
                _combine(raw[r_slot], raw[slot], raw[out])
            else:
                for t in range(m):
                    x = _get(r_kind, r_slot, t, raw, cvu, cnw, ccv, ccu, csu, cns, m, stats)
                    raw[out, t] = _get(kind, slot, x, raw, cvu, cnw, ccv, ccu, csu, cns, m, stats)
            stats[_S_COMBINE] += 1
            _check(raw[out], debug)
            if kind == _RAW:
                _release(raw_free, raw_top, slot, stats)
            elif kind == _COMP:
                _release(comp_free, comp_top, slot, stats)
            h_kind[sp, q] = _RAW
            h_slot[sp, q] = out
        if r_kind == _RAW:
            _release(raw_free, raw_top, r_slot, stats)
        else:
            _release(comp_free, comp_top, r_slot, stats)

        lr = h_slot[sp, 1]
        l1 = h_slot[sp, 2]
        lo = right[child_ids[first + k - 1]] + 1 if k > 0 else il + 1
        hi = left[c] - 1
        if hi >= lo:
            _extend_run(raw[lr], mask, qcodes, hi, lo)
            _extend_run(raw[l1], mask, qcodes, hi, lo)
            stats[_S_EXTEND] += 2 * (hi - lo + 1)
            _check(raw[lr], debug)
            _check(raw[l1], debug)
        if k > 0:
            f_k[sp] = k - 1
            f_state[sp] = 2
            continue

        # Gamma(il, ir - 1) from Gamma(il + 1, ir - 1), then meld
        gb = _alloc(raw_free, raw_top, stats)
        raw[gb, :] = raw[l1, :]
        _extend_inplace(raw[gb], mask[qcodes[il]])
        stats[_S_EXTEND] += 1
        _check(raw[gb], debug)
        out = _alloc(raw_free, raw_top, stats)
        _meld(raw[lr], raw[gb], raw[l1], False, left_partner, pcodes,
              qcodes[il], qcodes[ir], raw[out], flip_phi)
        stats[_S_MELD] += 1
        _check(raw[out], debug)
        _release(raw_free, raw_top, lr, stats)
        _release(raw_free, raw_top, gb, stats)
        _release(raw_free, raw_top, l1, stats)
        h_kind[sp, 1] = _NONE
        h_kind[sp, 2] = _NONE
        ret = out
        ret_kind = _RAW
        sp -= 1

    result = raw[ret].copy()
    _release(raw_free, raw_top, ret, stats)
    return result


# ---------------------------------------------------------------- Python API


@dataclass(frozen=True)
class EngineConfig:
    """Engine settings.

    ``debug`` re-checks the monotonicity bounds after every primitive and
    audits every encoding (length, popcounts, round trip) into the stats.
    ``flip_phi`` inverts the arc-to-arc test and exists only so fuzzing can
    prove it notices a broken recurrence.
    """

    mode: str = "uncompressed"
    collect_stats: bool = True
    max_interval_cache: None = None
    debug: bool = False
    flip_phi: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")

    @property
    def mode_id(self) -> int:
        return MODES.index(self.mode)


@dataclass
class EngineStats:
    initialize: int = 0
    extend: int = 0
    combine: int = 0
    meld: int = 0
    encode: int = 0
    decode: int = 0
    access: int = 0
    peak_live_gamma: int = 0
    peak_gamma_bits: int = 0
    envelope_checked: int = 0
    envelope_violations: int = 0
    wall_time: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_counters(cls, counters: np.ndarray, wall_time: float) -> "EngineStats":
        c = counters.tolist()
        return cls(
            initialize=c[_S_INIT],
            extend=c[_S_EXTEND],
            combine=c[_S_COMBINE],
            meld=c[_S_MELD],
            encode=c[_S_ENCODE],
            decode=c[_S_DECODE],
            access=c[_S_ACCESS],
            peak_live_gamma=c[_S_PEAK_LIVE],
            peak_gamma_bits=c[_S_PEAK_BITS],
            envelope_checked=c[_S_AUDITED],
            envelope_violations=c[_S_ENVELOPE_BAD],
            wall_time=wall_time,
        )


@dataclass(frozen=True, eq=False)
class PreparedText:
    """A wrapped text with its decomposed arc tree."""

    Q: ArcAnnotatedString
    tree: arctree.ArcTree

    @property
    def n(self) -> int:
        return len(self.Q)

    @property
    def n_arcs(self) -> int:
        return len(self.tree)

    @cached_property
    def max_lightdepth(self) -> int:
        return self.tree.max_lightdepth

    @cached_property
    def spaces_total(self) -> int:
        return arctree.spaces_count(self.tree)


def prepare_text(Q: ArcAnnotatedString) -> PreparedText:
    return PreparedText(Q, arctree.heavy_decompose(arctree.build(Q)))


@dataclass
class NapsResult:
    """Outcome of one run.

    ``gamma_root`` and ``root`` refer to the strings the engine actually ran
    on, which carry sentinel bases when ``wrapped`` is set.
    """

    is_subsequence: bool
    gamma_root: int
    root: GammaSeq
    stats: EngineStats | None
    wrapped: bool
    m: int
    n: int
    pattern_arcs: int
    text_arcs: int
    lightdepth_max: int
    spaces_total: int = field(default=0)

    @property
    def longest_prefix(self) -> int:
        """Longest prefix of the original pattern embeddable in the original text."""
        if not self.wrapped:
            return self.gamma_root
        return max(0, min(self.root[2] - 1, self.m - 2))


def wrap_pair(P: ArcAnnotatedString, Q: ArcAnnotatedString) -> tuple[ArcAnnotatedString, ArcAnnotatedString, bool]:
    """Give both strings an outer arc, sentinel-wrapping both or neither."""
    if P.has_outer_arc and Q.has_outer_arc:
        return P, Q, False
    return wrap(P, force=True), wrap(Q, force=True), True


def _pool_sizes(text: PreparedText) -> tuple[int, int]:
    depth = text.max_lightdepth
    return 3 * (depth + 1) + 8, 3 * (depth + 1) + 4


def naps_prepared(
    ctx: PatternContext,
    text: PreparedText,
    cfg: EngineConfig | None = None,
    *,
    wrapped: bool = False,
    qcodes: np.ndarray | None = None,
) -> NapsResult:
    """Run the traversal on a pattern and text that both carry outer arcs."""
    cfg = cfg or EngineConfig()
    if not ctx.P.has_outer_arc or not text.Q.has_outer_arc:
        raise ValueError("naps_prepared needs strings with outer arcs; use naps()")
    tree = text.tree
    if qcodes is None:
        qcodes = ctx.text_codes(text.Q)
    raw_cap, comp_cap = _pool_sizes(text)
    counters = np.zeros(_N_STATS, np.int64)
    t0 = time.perf_counter()
    values = _traverse(
        cfg.mode_id, ctx.mask, ctx.left_partner, ctx.codes, qcodes,
        tree.left, tree.right, tree.child_ptr, tree.child_ids, tree.heavy,
        raw_cap, comp_cap, cfg.debug, cfg.flip_phi, counters,
    )
    elapsed = time.perf_counter() - t0
    root = GammaSeq(values, 1, text.n)
    gamma_root = int(values[0])
    stats = EngineStats.from_counters(counters, elapsed) if cfg.collect_stats else None
    return NapsResult(
        is_subsequence=gamma_root == ctx.m,
        gamma_root=gamma_root,
        root=root,
        stats=stats,
        wrapped=wrapped,
        m=ctx.m,
        n=text.n,
        pattern_arcs=ctx.P.n_arcs,
        text_arcs=text.n_arcs,
        lightdepth_max=text.max_lightdepth,
        spaces_total=text.spaces_total if cfg.collect_stats else 0,
    )


def naps(P: ArcAnnotatedString, Q: ArcAnnotatedString, cfg: EngineConfig | None = None) -> NapsResult:
    """Decide whether ``P`` is an arc-preserving subsequence of ``Q``.

    Sentinel wrapping is applied to both strings unless both already carry
    their outer arc.
    """
    P2, Q2, wrapped = wrap_pair(P, Q)
    return naps_prepared(PatternContext(P2), prepare_text(Q2), cfg, wrapped=wrapped)


def longest_prefix(P: ArcAnnotatedString, Q: ArcAnnotatedString, cfg: EngineConfig | None = None) -> int:
    """Largest ``k`` with ``P[1, k]`` embeddable in ``Q`` and ``k`` splitting ``P``."""
    return naps(P, Q, cfg).longest_prefix


def light_depth_bound(n_arcs: int) -> int:
    """Largest light depth a heavy-path decomposition of ``n_arcs`` nodes allows."""
    return int(math.floor(math.log2(max(n_arcs, 1))))
