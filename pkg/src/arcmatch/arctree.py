"""Arc tree of a wrapped arc-annotated string and its heavy-path decomposition.

Nodes are arcs, numbered by rank in left-endpoint order, so node 0 is the
root arc ``(1, |S|)`` and the numbering is a preorder.  Everything is held in
flat ``int32`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .arcstr import ArcAnnotatedString
from .errors import MissingRootArc, OutOfRange

__all__ = ["ArcTree", "SpacesSet", "build", "heavy_decompose", "spaces", "spaces_ranges", "spaces_count"]


@njit(cache=True)
def _link(partner, lefts):
    # parent / first-child / next-sibling from a left-to-right sweep
    a_count = lefts.shape[0]
    parent = np.full(a_count, -1, np.int32)
    first_child = np.full(a_count, -1, np.int32)
    next_sibling = np.full(a_count, -1, np.int32)
    last_child = np.full(a_count, -1, np.int32)
    stack = np.empty(a_count, np.int32)
    sp = 0
    for a in range(a_count):
        il = lefts[a]
        while sp > 0 and partner[lefts[stack[sp - 1]]] < il:
            sp -= 1
        if sp > 0:
            p = stack[sp - 1]
            parent[a] = p
            if last_child[p] < 0:
                first_child[p] = a
            else:
                next_sibling[last_child[p]] = a
            last_child[p] = a
        stack[sp] = a
        sp += 1
    return parent, first_child, next_sibling


@njit(cache=True)
def _sizes(parent):
    a_count = parent.shape[0]
    size = np.ones(a_count, np.int32)
    # reverse preorder visits children before parents
    for a in range(a_count - 1, 0, -1):
        size[parent[a]] += size[a]
    return size


@njit(cache=True)
def _decompose(parent, first_child, next_sibling, size):
    a_count = parent.shape[0]
    heavy = np.full(a_count, -1, np.int32)
    lightdepth = np.zeros(a_count, np.int32)
    for a in range(a_count):
        best = -1
        c = first_child[a]
        while c >= 0:
            if best < 0 or size[c] > size[best]:
                best = c
            c = next_sibling[c]
        heavy[a] = best
    for a in range(1, a_count):
        p = parent[a]
        lightdepth[a] = lightdepth[p] + (0 if heavy[p] == a else 1)
    return heavy, lightdepth


@dataclass(frozen=True, eq=False)
class ArcTree:
    """Rooted ordered tree induced by the arcs of a wrapped string.

    Attributes
    ----------
    n            : length of the underlying string
    left, right  : arc endpoints per node
    parent       : parent node, -1 for the root
    first_child, next_sibling : ordered child lists (left to right)
    child_ptr, child_ids      : the same lists in CSR form
    size         : number of arcs in each subtree
    heavy        : heavy child per node (-1 for leaves); empty until decomposed
    lightdepth   : light edges on the path to the root; empty until decomposed
    """

    n: int
    left: np.ndarray
    right: np.ndarray
    parent: np.ndarray
    first_child: np.ndarray
    next_sibling: np.ndarray
    child_ptr: np.ndarray
    child_ids: np.ndarray
    size: np.ndarray
    heavy: np.ndarray
    lightdepth: np.ndarray

    def __len__(self) -> int:
        return int(self.left.shape[0])

    @property
    def root(self) -> int:
        return 0

    @property
    def decomposed(self) -> bool:
        return self.heavy.shape[0] == self.left.shape[0]

    def arc(self, node: int) -> tuple[int, int]:
        return int(self.left[node]), int(self.right[node])

    def node_of(self, il: int, ir: int) -> int:
        hit = int(np.searchsorted(self.left, il))
        if hit >= len(self) or self.left[hit] != il or self.right[hit] != ir:
            raise OutOfRange(f"({il}, {ir}) is not an arc of this tree")
        return hit

    def children(self, node: int) -> list[int]:
        return self.child_ids[self.child_ptr[node] : self.child_ptr[node + 1]].tolist()

    def is_heavy(self, node: int) -> bool:
        p = int(self.parent[node])
        return p >= 0 and int(self.heavy[p]) == node

    @property
    def max_lightdepth(self) -> int:
        return int(self.lightdepth.max()) if self.lightdepth.size else 0

    def preorder(self) -> list[tuple[int, int]]:
        """Euler-tour entry order; equals left-endpoint order of the arcs."""
        out = []
        stack = [0]
        while stack:
            v = stack.pop()
            out.append(self.arc(v))
            stack.extend(reversed(self.children(v)))
        return out

    def dump(self) -> str:
        """Indented text rendering: one arc per line, ``*`` marks heavy arcs."""
        lines = []
        stack = [(0, 0)]
        while stack:
            v, depth = stack.pop()
            mark = "*" if self.decomposed and self.is_heavy(v) else " "
            extra = f" lightdepth={int(self.lightdepth[v])}" if self.decomposed else ""
            lines.append(f"{'  ' * depth}{mark}({self.left[v]},{self.right[v]}) size={self.size[v]}{extra}")
            stack.extend((c, depth + 1) for c in reversed(self.children(v)))
        return "\n".join(lines)


_EMPTY = np.empty(0, np.int32)


def build(S: ArcAnnotatedString) -> ArcTree:
    """Tree of ``S``'s arc nesting; ``S`` must carry the arc ``(1, |S|)``."""
    if not S.has_outer_arc:
        raise MissingRootArc("string lacks the outer arc (1, |S|); wrap it first")
    lefts = np.ascontiguousarray(S.left_endpoints, dtype=np.int32)
    partner = np.ascontiguousarray(S.partner, dtype=np.int32)
    parent, first_child, next_sibling = _link(partner, lefts)
    size = _sizes(parent)
    counts = np.bincount(parent[1:], minlength=len(lefts)).astype(np.int32)
    child_ptr = np.zeros(len(lefts) + 1, np.int32)
    np.cumsum(counts, out=child_ptr[1:])
    # preorder keeps each parent's children sorted left to right
    child_ids = np.argsort(parent[1:], kind="stable").astype(np.int32) + 1
    arrays = dict(
        left=lefts.copy(),
        right=partner[lefts].astype(np.int32),
        parent=parent,
        first_child=first_child,
        next_sibling=next_sibling,
        child_ptr=child_ptr,
        child_ids=child_ids,
        size=size,
    )
    for arr in arrays.values():
        arr.setflags(write=False)
    return ArcTree(n=len(S), heavy=_EMPTY, lightdepth=_EMPTY, **arrays)


def heavy_decompose(T: ArcTree) -> ArcTree:
    """Mark the heavy child of every internal arc and fill in light depths.

    Ties go to the leftmost child of maximum size.
    """
    heavy, lightdepth = _decompose(T.parent, T.first_child, T.next_sibling, T.size)
    heavy.setflags(write=False)
    lightdepth.setflags(write=False)
    return ArcTree(
        n=T.n,
        left=T.left,
        right=T.right,
        parent=T.parent,
        first_child=T.first_child,
        next_sibling=T.next_sibling,
        child_ptr=T.child_ptr,
        child_ids=T.child_ids,
        size=T.size,
        heavy=heavy,
        lightdepth=lightdepth,
    )


@dataclass(frozen=True)
class SpacesSet:
    arc: tuple[int, int]
    positions: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.positions)


def spaces_ranges(T: ArcTree, node: int) -> list[tuple[int, int]]:
    """Maximal runs ``[a, b]`` of positions inside ``node`` but outside its children."""
    il, ir = T.arc(node)
    runs = []
    cursor = il
    for c in T.children(node):
        cl, cr = T.arc(c)
        if cursor < cl:
            runs.append((cursor, cl - 1))
        cursor = cr + 1
    if cursor <= ir:
        runs.append((cursor, ir))
    return runs


def spaces(T: ArcTree, arc: int | tuple[int, int]) -> SpacesSet:
    """Positions of ``arc`` not covered by any child arc."""
    node = T.node_of(*arc) if isinstance(arc, tuple) else int(arc)
    positions = tuple(p for a, b in spaces_ranges(T, node) for p in range(a, b + 1))
    return SpacesSet(T.arc(node), positions)


def spaces_count(T: ArcTree) -> int:
    """Sum of ``|spaces(a)|`` over all arcs, computed from sizes of child spans."""
    span = T.right - T.left + 1
    covered = np.zeros(len(T), np.int64)
    np.add.at(covered, T.parent[1:], span[1:])
    return int((span - covered).sum())
