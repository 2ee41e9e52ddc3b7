"""Nested arc-annotated strings.

Positions are 1-indexed everywhere.  An arc is a pair ``(il, ir)`` with
``il < ir``; arc sets are nested (no two arcs cross) and endpoint-disjoint.

The partner table is a numpy ``int32`` array of length ``len(S) + 1`` where
``partner[i]`` is the other endpoint of the arc at ``i`` and ``0`` means
"unpaired".  Slot 0 is unused.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
from numba import njit

from .errors import (
    CrossingArcs,
    InputError,
    InvalidBase,
    InvalidStructureChar,
    LengthMismatch,
    OutOfRange,
    SharedEndpoint,
    UnbalancedStructure,
)

SENTINEL = "#"
STRUCTURE_CHARS = frozenset("().")
_FORBIDDEN_BASES = frozenset("().")

__all__ = [
    "SENTINEL",
    "ArcAnnotatedString",
    "SubstringView",
    "DotBracketRecord",
    "parse_dotbracket",
    "validate",
    "wrap",
    "is_arc_preserving_split",
    "substring_view",
    "read_dotbracket",
    "format_dotbracket",
]


@dataclass(frozen=True, eq=False)
class ArcAnnotatedString:
    """Immutable base sequence plus a nested, endpoint-disjoint arc set.

    Build instances through :func:`parse_dotbracket` or :func:`validate`;
    the constructor trusts its arguments.
    """

    bases: str
    partner: np.ndarray

    def __post_init__(self) -> None:
        self.partner.setflags(write=False)

    def __len__(self) -> int:
        return len(self.bases)

    @property
    def length(self) -> int:
        return len(self.bases)

    def __getitem__(self, i: int) -> str:
        if not 1 <= i <= len(self.bases):
            raise OutOfRange(f"position {i} outside [1, {len(self.bases)}]")
        return self.bases[i - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ArcAnnotatedString):
            return NotImplemented
        return self.bases == other.bases and np.array_equal(self.partner, other.partner)

    def __hash__(self) -> int:
        return hash((self.bases, self.partner.tobytes()))

    def __repr__(self) -> str:
        return f"ArcAnnotatedString({self.bases!r}, {self.structure!r})"

    def partner_of(self, i: int) -> int | None:
        p = int(self.partner[i])
        return p or None

    def has_arc(self, il: int, ir: int) -> bool:
        return 1 <= il < ir <= len(self.bases) and int(self.partner[il]) == ir

    @cached_property
    def left_endpoints(self) -> np.ndarray:
        """Sorted left endpoints, one per arc (so arc rank = index here)."""
        idx = np.arange(len(self.partner), dtype=np.int32)
        out = np.flatnonzero(self.partner > idx).astype(np.int32)
        out.setflags(write=False)
        return out

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        """Arcs ordered by left endpoint."""
        lefts = self.left_endpoints
        rights = self.partner[lefts]
        return tuple(zip(lefts.tolist(), rights.tolist()))

    @property
    def n_arcs(self) -> int:
        return int(self.left_endpoints.shape[0])

    @cached_property
    def open_depth(self) -> np.ndarray:
        """``open_depth[i]`` = number of arcs with ``il <= i < ir``."""
        n = len(self.bases)
        step = np.zeros(n + 1, dtype=np.int32)
        idx = np.arange(n + 1)
        step[self.partner > idx] = 1
        step[(self.partner < idx) & (self.partner > 0)] = -1
        out = np.cumsum(step, dtype=np.int32)
        out.setflags(write=False)
        return out

    @property
    def structure(self) -> str:
        chars = ["."] * len(self.bases)
        for il, ir in self.arcs:
            chars[il - 1] = "("
            chars[ir - 1] = ")"
        return "".join(chars)

    @property
    def has_outer_arc(self) -> bool:
        n = len(self.bases)
        return n >= 2 and int(self.partner[1]) == n


@dataclass(frozen=True)
class SubstringView:
    """Logical view of ``S[i1, i2]``; ``i1 > i2`` is the empty string.

    Local positions run ``1 .. len(view)``.  Only arcs with both endpoints
    inside the view survive.
    """

    source: ArcAnnotatedString
    i1: int
    i2: int

    def __len__(self) -> int:
        return max(0, self.i2 - self.i1 + 1)

    @property
    def length(self) -> int:
        return len(self)

    @property
    def bases(self) -> str:
        if self.i1 > self.i2:
            return ""
        return self.source.bases[self.i1 - 1 : self.i2]

    def __getitem__(self, i: int) -> str:
        if not 1 <= i <= len(self):
            raise OutOfRange(f"position {i} outside view of length {len(self)}")
        return self.source.bases[self.i1 + i - 2]

    def partner_of(self, i: int) -> int | None:
        """Local partner of local position ``i``, if the arc lies inside the view."""
        g = self.i1 + i - 1
        p = int(self.source.partner[g])
        if p and self.i1 <= p <= self.i2:
            return p - self.i1 + 1
        return None

    @property
    def arcs(self) -> tuple[tuple[int, int], ...]:
        off = self.i1 - 1
        return tuple(
            (il - off, ir - off)
            for il, ir in self.source.arcs
            if self.i1 <= il and ir <= self.i2
        )

    def materialize(self) -> ArcAnnotatedString:
        n = len(self)
        partner = np.zeros(n + 1, dtype=np.int32)
        for il, ir in self.arcs:
            partner[il] = ir
            partner[ir] = il
        return ArcAnnotatedString(self.bases, partner)


_STRUCT_CODES = np.frombuffer(b"().", dtype=np.uint8)


@njit(cache=True)
def _match_brackets(codes):
    n = codes.shape[0]
    partner = np.zeros(n + 1, np.int32)
    stack = np.empty(n, np.int32)
    sp = 0
    for k in range(n):
        pos = k + 1
        if codes[k] == 40:
            stack[sp] = pos
            sp += 1
        elif codes[k] == 41:
            if sp == 0:
                return partner, 1, pos
            sp -= 1
            il = stack[sp]
            partner[il] = pos
            partner[pos] = il
    if sp:
        return partner, 2, stack[sp - 1]
    return partner, 0, 0


def _check_bases(bases: str, allow_sentinel: bool) -> None:
    symbols = set(bases)
    bad = symbols & _FORBIDDEN_BASES
    if not allow_sentinel and SENTINEL in symbols:
        bad.add(SENTINEL)
    if bad:
        raise InvalidBase(f"illegal base symbol(s) {sorted(bad)!r}")
    for ch in symbols:
        if not ch.isprintable() or ch.isspace():
            raise InvalidBase(f"illegal base symbol {ch!r}")


def parse_dotbracket(
    sequence_line: str, structure_line: str, *, allow_sentinel: bool = False
) -> ArcAnnotatedString:
    """Build an arc-annotated string from a base line and a dot-bracket line."""
    if len(sequence_line) != len(structure_line):
        raise LengthMismatch(
            f"sequence has {len(sequence_line)} bases but structure has "
            f"{len(structure_line)} characters"
        )
    _check_bases(sequence_line, allow_sentinel)
    try:
        codes = np.frombuffer(structure_line.encode("ascii"), dtype=np.uint8)
    except UnicodeEncodeError:
        codes = None
    if codes is None or not np.isin(codes, _STRUCT_CODES).all():
        pos, ch = next((k, c) for k, c in enumerate(structure_line, 1) if c not in STRUCTURE_CHARS)
        raise InvalidStructureChar(f"invalid structure character {ch!r} at position {pos}")
    partner, status, where = _match_brackets(codes)
    if status == 1:
        raise UnbalancedStructure(f"unmatched ')' at position {where}")
    if status == 2:
        raise UnbalancedStructure(f"unmatched '(' at position {where}")
    return ArcAnnotatedString(sequence_line, partner)


def validate(
    bases: str, arcs: Iterable[Sequence[int]], *, allow_sentinel: bool = False
) -> ArcAnnotatedString:
    """Check a raw arc list and return the normalized string.

    Arcs may be given in either endpoint order.
    """
    _check_bases(bases, allow_sentinel)
    n = len(bases)
    partner = np.zeros(n + 1, dtype=np.int32)
    for a, b in arcs:
        il, ir = (int(a), int(b)) if a < b else (int(b), int(a))
        if il < 1 or ir > n or il == ir:
            raise OutOfRange(f"arc ({a}, {b}) outside [1, {n}] or degenerate")
        for p in (il, ir):
            if partner[p]:
                raise SharedEndpoint(f"position {p} is an endpoint of two arcs")
        partner[il] = ir
        partner[ir] = il
    stack: list[int] = []
    for pos in range(1, n + 1):
        p = int(partner[pos])
        if p > pos:
            stack.append(pos)
        elif p:
            if stack[-1] != p:
                raise CrossingArcs(f"arc ({p}, {pos}) crosses arc ({stack[-1]}, {int(partner[stack[-1]])})")
            stack.pop()
    return ArcAnnotatedString(bases, partner)


def wrap(S: ArcAnnotatedString, *, force: bool = False) -> ArcAnnotatedString:
    """Enclose ``S`` in sentinel bases joined by an outer arc.

    Returns ``S`` itself when it already has the arc ``(1, |S|)`` unless
    ``force`` is set.
    """
    if S.has_outer_arc and not force:
        return S
    n = len(S)
    partner = np.zeros(n + 3, dtype=np.int32)
    inner = S.partner[1:]
    partner[2 : n + 2] = np.where(inner > 0, inner + 1, 0)
    partner[1] = n + 2
    partner[n + 2] = 1
    return ArcAnnotatedString(SENTINEL + S.bases + SENTINEL, partner)


def is_arc_preserving_split(S: ArcAnnotatedString | SubstringView, i: int) -> bool:
    """True iff no arc ``(il, ir)`` of ``S`` has ``il <= i < ir``."""
    n = len(S)
    if not 0 <= i <= n:
        raise OutOfRange(f"split index {i} outside [0, {n}]")
    if isinstance(S, ArcAnnotatedString):
        return i == 0 or int(S.open_depth[i]) == 0
    return not any(il <= i < ir for il, ir in S.arcs)


def substring_view(S: ArcAnnotatedString, i1: int, i2: int) -> SubstringView:
    if i1 <= i2 and (i1 < 1 or i2 > len(S)):
        raise OutOfRange(f"view [{i1}, {i2}] outside [1, {len(S)}]")
    return SubstringView(S, i1, i2)


@dataclass(frozen=True)
class DotBracketRecord:
    name: str
    string: ArcAnnotatedString


def _iter_records(lines: list[str]) -> Iterator[tuple[int, str, str, str]]:
    k = 0
    while k < len(lines):
        if not lines[k].strip():
            k += 1
            continue
        header = lines[k]
        if not header.startswith(">"):
            raise InvalidStructureChar(f"line {k + 1}: expected '>' identifier line, got {header!r}")
        if k + 2 >= len(lines):
            raise LengthMismatch(f"record {header[1:].strip()!r} is truncated")
        yield k + 1, header[1:].strip(), lines[k + 1], lines[k + 2]
        k += 3


def read_dotbracket(source: str | Path, *, text: bool = False) -> list[DotBracketRecord]:
    """Read three-line dot-bracket records (``>name``, bases, structure).

    ``source`` is a path unless ``text`` is set.  Errors name the record.
    """
    content = source if text else Path(source).read_text(encoding="utf-8")
    lines = str(content).split("\n")
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in lines]
    while lines and not lines[-1].strip():
        lines.pop()
    records = []
    for lineno, name, seq, struct in _iter_records(lines):
        try:
            s = parse_dotbracket(seq, struct)
        except InputError as exc:
            raise type(exc)(f"record {name!r} (line {lineno}): {exc}") from exc
        records.append(DotBracketRecord(name, s))
    return records


def format_dotbracket(name: str, S: ArcAnnotatedString) -> str:
    return f">{name}\n{S.bases}\n{S.structure}\n"
