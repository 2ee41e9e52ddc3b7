"""Rank/select bitvectors and the two-bitstring Gamma encoding.

Bits are 1-indexed in the public API and stored LSB-first in ``uint64``
words (bit ``p`` lives in word ``(p - 1) // 64``).

Rank index: one cumulative ``int64`` count per 512-bit block; inside a block
the answer is finished with at most eight word popcounts.  Select index: the
block holding every 512th one is sampled (``int32``), then a binary search
over block counts and a bounded word scan locate the bit.

A Gamma sequence ``g_m, ..., g_1`` (``g_k`` the entry for suffix ``k``) is
stored as two equal-length bitstrings.  ``V`` concatenates pieces
``s_m, ..., s_1``: ``s_m`` is the single bit ``m - g_m``; for ``k < m`` the
piece is ``0`` when ``g_{k+1} = g_k`` and otherwise ``g_{k+1} - g_k`` ones.
``U`` has a one at the last bit of every piece, so
``g_k = m - rank(V, select(U, m + 1 - k))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numba import njit

from .errors import InvalidSequence, MalformedEncoding, NotEnoughOnes, OutOfRange
from .gamma import GammaSeq

__all__ = [
    "BitVector",
    "CompressedGamma",
    "encode",
    "decode",
    "access",
    "capacity_words",
]

BLOCK_WORDS = 8
BLOCK_BITS = 64 * BLOCK_WORDS
SAMPLE_RATE = 512

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


# ---------------------------------------------------------------- kernels


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def _select_in_word(x, r):
    """0-based offset of the ``r``-th (1-based) set bit of ``x``."""
    for _ in range(r - 1):
        x = x & (x - _ONE)
    low = x & (~x + _ONE)
    return _popcount(low - _ONE)


@njit(cache=True, inline="always")
def _get_bit(words, q):
    return (words[q >> 6] >> np.uint64(q & 63)) & _ONE


@njit(cache=True, inline="always")
def _set_bit(words, q):
    words[q >> 6] |= _ONE << np.uint64(q & 63)


@njit(cache=True)
def _fill_rank(words, nwords, coarse):
    """``coarse[b]`` = ones in words ``[0, 8b)``; needs ``nwords // 8 + 2`` slots."""
    acc = 0
    nblocks = (nwords + BLOCK_WORDS - 1) // BLOCK_WORDS
    for b in range(nblocks):
        coarse[b] = acc
        hi = min(nwords, (b + 1) * BLOCK_WORDS)
        for w in range(b * BLOCK_WORDS, hi):
            acc += _popcount(words[w])
    coarse[nblocks] = acc
    return acc


@njit(cache=True)
def _fill_select(coarse, nblocks, total, samples):
    """``samples[s]`` = block holding the ``(512 s + 1)``-th one."""
    s = 0
    target = 1
    b = 0
    while target <= total:
        while coarse[b + 1] < target:
            b += 1
        samples[s] = b
        s += 1
        target += SAMPLE_RATE
    samples[s] = max(nblocks - 1, 0)
    return s + 1


@njit(cache=True)
def _rank(words, coarse, k):
    """Ones among bits ``1..k``."""
    w = k >> 6
    b = w // BLOCK_WORDS
    r = coarse[b]
    for x in range(b * BLOCK_WORDS, w):
        r += _popcount(words[x])
    rem = k & 63
    if rem:
        r += _popcount(words[w] & ((_ONE << np.uint64(rem)) - _ONE))
    return r


@njit(cache=True)
def _select(words, nwords, coarse, samples, nsamples, k):
    """1-based position of the ``k``-th one."""
    s = (k - 1) // SAMPLE_RATE
    lo = samples[s]
    hi = samples[s + 1] if s + 1 < nsamples else samples[nsamples - 1]
    # last block whose cumulative count is below k
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if coarse[mid] < k:
            lo = mid
        else:
            hi = mid - 1
    r = k - coarse[lo]
    w = lo * BLOCK_WORDS
    while True:
        c = _popcount(words[w])
        if r <= c:
            return w * 64 + _select_in_word(words[w], r) + 1
        r -= c
        w += 1


@njit(cache=True)
def _rank_many(words, coarse, ks, out):
    for q in range(ks.shape[0]):
        out[q] = _rank(words, coarse, ks[q])


@njit(cache=True)
def _select_many(words, nwords, coarse, samples, nsamples, ks, out):
    for q in range(ks.shape[0]):
        out[q] = _select(words, nwords, coarse, samples, nsamples, ks[q])


@njit(cache=True)
def _encode_into(g, vu):
    """Write V into ``vu[:, 0]`` and U into ``vu[:, 1]`` (zeroed); return |V| or -1."""
    m = g.shape[0]
    for t in range(m):
        nxt = m if t + 1 >= m else g[t + 1]
        if g[t] < t or g[t] > nxt:
            return -1
    v = vu[:, 0]
    u = vu[:, 1]
    pos = 0
    if m - g[m - 1] == 1:
        _set_bit(v, pos)
    _set_bit(u, pos)
    pos += 1
    for k in range(m - 1, 0, -1):
        d = g[k] - g[k - 1]
        if d == 0:
            pos += 1
        else:
            for _ in range(d):
                _set_bit(v, pos)
                pos += 1
        _set_bit(u, pos - 1)
    return pos


@njit(cache=True)
def _decode_into(vu, nbits, out):
    """Inverse of ``_encode_into``; return 0 on success, -1 if malformed."""
    m = out.shape[0]
    v = vu[:, 0]
    u = vu[:, 1]
    d = 0
    k = m
    for q in range(nbits):
        d += np.int64(_get_bit(v, q))
        if _get_bit(u, q):
            if k == 0:
                return -1
            out[k - 1] = m - d
            k -= 1
    if k != 0:
        return -1
    for t in range(m):
        nxt = m if t + 1 >= m else out[t + 1]
        if out[t] < t or out[t] > nxt:
            return -1
    return 0


@njit(cache=True)
def _access(vu, nwords, coarse_v, coarse_u, samples_u, nsamples_u, m, k):
    """Entry for suffix ``k`` (1-based) straight from the encoded bits."""
    u = vu[:, 1]
    end = _select(u, nwords, coarse_u, samples_u, nsamples_u, m + 1 - k)
    return m - _rank(vu[:, 0], coarse_v, end)


# ---------------------------------------------------------------- BitVector


def capacity_words(nbits: int) -> int:
    return max(1, (nbits + 63) // 64)


def _pack(bits: np.ndarray) -> np.ndarray:
    nwords = capacity_words(len(bits))
    raw = np.packbits(bits.astype(np.uint8), bitorder="little")
    buf = np.zeros(nwords * 8, dtype=np.uint8)
    buf[: raw.size] = raw
    return buf.view(np.uint64)


class BitVector:
    """Static bitvector with constant-time ``rank`` and ``select``.

    ``words`` may be a strided view (the Gamma encoder interleaves V and U).
    """

    def __init__(self, words: np.ndarray, nbits: int):
        self.words = words
        self.nbits = int(nbits)
        self.nwords = capacity_words(self.nbits)
        nblocks = (self.nwords + BLOCK_WORDS - 1) // BLOCK_WORDS
        self.coarse = np.zeros(nblocks + 1, dtype=np.int64)
        self.ones = int(_fill_rank(words, self.nwords, self.coarse))
        samples = np.zeros(self.ones // SAMPLE_RATE + 2, dtype=np.int32)
        self.nsamples = int(_fill_select(self.coarse, nblocks, self.ones, samples))
        self.samples = samples[: self.nsamples]

    @classmethod
    def from_bits(cls, bits: Iterable[int] | str | np.ndarray) -> "BitVector":
        if isinstance(bits, str):
            arr = np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")
            if arr.size and arr.max() > 1:
                raise ValueError("bit string may only contain '0' and '1'")
        else:
            arr = np.asarray(list(bits) if not isinstance(bits, np.ndarray) else bits, dtype=np.uint8)
        return cls(_pack(arr), len(arr))

    def __len__(self) -> int:
        return self.nbits

    def __getitem__(self, p: int) -> int:
        if not 1 <= p <= self.nbits:
            raise OutOfRange(f"bit {p} outside [1, {self.nbits}]")
        q = p - 1
        return int((int(self.words[q >> 6]) >> (q & 63)) & 1)

    def rank(self, k: int) -> int:
        if not 0 <= k <= self.nbits:
            raise OutOfRange(f"rank position {k} outside [0, {self.nbits}]")
        return int(_rank(self.words, self.coarse, k))

    def select(self, k: int) -> int:
        if not 1 <= k <= self.ones:
            raise NotEnoughOnes(f"select({k}) but only {self.ones} ones")
        return int(_select(self.words, self.nwords, self.coarse, self.samples, self.nsamples, k))

    def rank_many(self, ks) -> np.ndarray:
        """Vectorised :meth:`rank` without per-query interpreter overhead."""
        ks = np.ascontiguousarray(ks, dtype=np.int64)
        if ks.size and (ks.min() < 0 or ks.max() > self.nbits):
            raise OutOfRange(f"rank positions must lie in [0, {self.nbits}]")
        out = np.empty(ks.shape[0], np.int64)
        _rank_many(self.words, self.coarse, ks, out)
        return out

    def select_many(self, ks) -> np.ndarray:
        ks = np.ascontiguousarray(ks, dtype=np.int64)
        if ks.size and (ks.min() < 1 or ks.max() > self.ones):
            raise NotEnoughOnes(f"select arguments must lie in [1, {self.ones}]")
        out = np.empty(ks.shape[0], np.int64)
        _select_many(self.words, self.nwords, self.coarse, self.samples, self.nsamples, ks, out)
        return out

    def to_string(self) -> str:
        return "".join(str(self[p]) for p in range(1, self.nbits + 1))

    def __repr__(self) -> str:
        body = self.to_string() if self.nbits <= 64 else f"{self.nbits} bits"
        return f"BitVector({body})"

    @property
    def payload_bits(self) -> int:
        return self.nbits

    @property
    def metadata_bits(self) -> int:
        return self.coarse.size * 64 + self.samples.size * 32


# ---------------------------------------------------------------- Gamma codec


@dataclass(frozen=True, eq=False)
class CompressedGamma:
    """Encoded Gamma sequence.  ``words[:, 0]`` is V, ``words[:, 1]`` is U."""

    m: int
    words: np.ndarray
    nbits: int
    i1: int
    i2: int
    V: BitVector
    U: BitVector

    @property
    def interval(self) -> tuple[int, int]:
        return self.i1, self.i2

    @property
    def bits(self) -> int:
        """Payload plus rank/select metadata."""
        return 2 * self.nbits + self.V.metadata_bits + self.U.metadata_bits

    def hexdump(self) -> str:
        v = "".join(f"{int(w):016x}" for w in self.words[:, 0][::-1])
        u = "".join(f"{int(w):016x}" for w in self.words[:, 1][::-1])
        return f"m={self.m} |V|={self.nbits}\nV=0x{v}\nU=0x{u}"


def _wrap_words(m: int, words: np.ndarray, nbits: int, i1: int, i2: int) -> CompressedGamma:
    words.setflags(write=False)
    return CompressedGamma(m, words, nbits, i1, i2, BitVector(words[:, 0], nbits), BitVector(words[:, 1], nbits))


def encode(g: GammaSeq) -> CompressedGamma:
    """Compress ``g`` into the V/U bitstrings (at most ``2m + 1`` bits each)."""
    m = g.m
    words = np.zeros((capacity_words(2 * m + 1), 2), dtype=np.uint64)
    nbits = int(_encode_into(np.ascontiguousarray(g.values, dtype=np.int32), words))
    if nbits < 0:
        raise InvalidSequence(f"not a valid Gamma sequence: {g.values.tolist()}")
    return _wrap_words(m, words, nbits, g.i1, g.i2)


def from_bitstrings(m: int, V: str, U: str, interval: tuple[int, int] = (1, 0)) -> CompressedGamma:
    """Assemble an encoding from explicit ``'0'``/``'1'`` strings."""
    if len(V) != len(U):
        raise MalformedEncoding("V and U differ in length")
    words = np.zeros((capacity_words(len(V)), 2), dtype=np.uint64)
    words[:, 0] = BitVector.from_bits(V).words[: words.shape[0]] if V else 0
    words[:, 1] = BitVector.from_bits(U).words[: words.shape[0]] if U else 0
    return _wrap_words(m, words, len(V), *interval)


def decode(c: CompressedGamma) -> GammaSeq:
    """Recover the Gamma sequence with one scan over V and U."""
    out = np.empty(c.m, np.int32)
    if c.U.ones != c.m or _decode_into(c.words, c.nbits, out) != 0:
        raise MalformedEncoding("bitstrings do not encode a Gamma sequence")
    return GammaSeq(out, c.i1, c.i2)


def access(c: CompressedGamma, k: int) -> int:
    """Entry for suffix ``k`` via ``m - rank(V, select(U, m + 1 - k))``."""
    if not 1 <= k <= c.m:
        raise OutOfRange(f"k={k} outside [1, {c.m}]")
    return c.m - c.V.rank(c.U.select(c.m + 1 - k))
