"""Directed labelled trees and the extended-Pruefer codec.

Vertices are dense integers ``0..n-1``.  A directed tree is a rooted tree
with every edge oriented parent -> child, so the undirected skeleton plus a
root choice determines all orientations.  That is what makes the extended
code (standard Pruefer sequence plus a root id, ``n-1`` symbols in total) a
bijection onto the ``n^(n-1)`` directed trees on ``n`` labelled vertices.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import _backend
from .errors import InvalidCodeError, TreeInvariantError, UnsupportedSizeError

__all__ = [
    "DirectedTree",
    "ExtendedPrueferCode",
    "DegreeHistogram",
    "decode_extended_pruefer",
    "encode_extended_pruefer",
    "out_degree_histogram",
    "undirected_adjacency",
    "enumerate_directed_trees",
    "pack_codes",
    "pack_parents",
    "tree_from_parent_row",
]


class ExtendedPrueferCode(NamedTuple):
    """Pruefer sequence of the undirected skeleton plus the root id."""

    code: tuple[int, ...]
    root: int

    @property
    def n(self) -> int:
        return len(self.code) + 2


@dataclass(frozen=True)
class DirectedTree:
    """Rooted tree on ``n`` labelled vertices with parent -> child edges.

    ``parent[v]`` is the head of vertex ``v``; the root carries ``-1``.
    Instances are immutable and validated on construction, so every value
    in circulation satisfies the tree invariants.
    """

    n: int
    root: int
    parent: tuple[int, ...]

    @classmethod
    def from_parents(cls, parents: Sequence[int], validate: bool = True) -> "DirectedTree":
        parents = tuple(int(p) for p in parents)
        n = len(parents)
        roots = [v for v, p in enumerate(parents) if p == -1]
        if len(roots) != 1:
            raise TreeInvariantError("expected exactly one root, found %d" % len(roots))
        tree = cls(n=n, root=roots[0], parent=parents)
        if validate:
            tree._validate()
        return tree

    @classmethod
    def from_edges(cls, n: int, root: int, edges: Iterable[tuple[int, int]]) -> "DirectedTree":
        if n < 1:
            raise TreeInvariantError("vertex count must be >= 1")
        if not 0 <= root < n:
            raise TreeInvariantError("root %r out of range" % (root,))
        parents = [-2] * n
        count = 0
        for head, child in edges:
            count += 1
            if not (0 <= head < n and 0 <= child < n):
                raise TreeInvariantError("edge (%r, %r) out of range" % (head, child))
            if head == child:
                raise TreeInvariantError("self-loop at vertex %d" % head)
            if parents[child] != -2:
                raise TreeInvariantError("vertex %d has two incoming edges" % child)
            parents[child] = head
        if count != n - 1:
            raise TreeInvariantError("expected %d edges, got %d" % (n - 1, count))
        if parents[root] != -2:
            raise TreeInvariantError("root %d has an incoming edge" % root)
        parents[root] = -1
        if any(p == -2 for p in parents):
            missing = [v for v, p in enumerate(parents) if p == -2]
            raise TreeInvariantError("vertices %r have no incoming edge" % missing)
        tree = cls(n=n, root=root, parent=tuple(parents))
        tree._validate()
        return tree

    def _validate(self) -> None:
        n = self.n
        if n < 1 or len(self.parent) != n or not 0 <= self.root < n:
            raise TreeInvariantError("inconsistent tree fields")
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(self.parent):
            if v == self.root:
                if p != -1:
                    raise TreeInvariantError("root must have parent -1")
                continue
            if not 0 <= p < n:
                raise TreeInvariantError("parent of %d out of range" % v)
            if p == v:
                raise TreeInvariantError("self-loop at vertex %d" % v)
            children[p].append(v)
        # reachability from the root is exactly connectedness here, since
        # every non-root vertex has one incoming edge
        seen = 1
        stack = [self.root]
        visited = [False] * n
        visited[self.root] = True
        while stack:
            for c in children[stack.pop()]:
                if not visited[c]:
                    visited[c] = True
                    seen += 1
                    stack.append(c)
        if seen != n:
            raise TreeInvariantError("tree is not connected")

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset((p, v) for v, p in enumerate(self.parent) if p >= 0)

    def out_degrees(self) -> list[int]:
        deg = [0] * self.n
        for p in self.parent:
            if p >= 0:
                deg[p] += 1
        return deg

    def undirected_degrees(self) -> list[int]:
        deg = self.out_degrees()
        for v in range(self.n):
            if v != self.root:
                deg[v] += 1
        return deg


@dataclass(frozen=True)
class DegreeHistogram:
    """Counts of vertices per out-degree value."""

    counts: dict[int, int]

    @property
    def n(self) -> int:
        return sum(self.counts.values())


def decode_extended_pruefer(code: ExtendedPrueferCode) -> DirectedTree:
    """Decode an extended Pruefer code into its unique directed tree.

    Uses the standard smallest-leaf-first decoding of the Pruefer sequence
    and then orients every edge away from the stored root.
    """
    n = code.n
    for sym in code.code:
        if not 0 <= sym < n:
            raise InvalidCodeError("code symbol %r out of range for n=%d" % (sym, n))
    if not 0 <= code.root < n:
        raise InvalidCodeError("root %r out of range for n=%d" % (code.root, n))
    packed, ns = pack_codes([code])
    parents = _backend.decode_codes(packed, ns)
    return tree_from_parent_row(parents[0], n)


def encode_extended_pruefer(tree: DirectedTree) -> ExtendedPrueferCode:
    """Inverse codec: recover the extended Pruefer code of a directed tree."""
    n = tree.n
    if n < 2:
        raise UnsupportedSizeError("codes are defined for n >= 2")
    if n == 2:
        return ExtendedPrueferCode((), tree.root)
    nbrs: list[set[int]] = [set() for _ in range(n)]
    for head, child in tree.edges:
        nbrs[head].add(child)
        nbrs[child].add(head)
    leaves = [v for v in range(n) if len(nbrs[v]) == 1]
    heapq.heapify(leaves)
    out = []
    for _ in range(n - 2):
        leaf = heapq.heappop(leaves)
        parent = nbrs[leaf].pop()
        out.append(parent)
        nbrs[parent].discard(leaf)
        if len(nbrs[parent]) == 1:
            heapq.heappush(leaves, parent)
    return ExtendedPrueferCode(tuple(out), tree.root)


def out_degree_histogram(tree: DirectedTree) -> DegreeHistogram:
    counts: dict[int, int] = {}
    for k in tree.out_degrees():
        counts[k] = counts.get(k, 0) + 1
    return DegreeHistogram(counts)


def undirected_adjacency(tree: DirectedTree) -> np.ndarray:
    """Symmetric 0/1 adjacency matrix of the undirected skeleton."""
    a = np.zeros((tree.n, tree.n))
    for v, p in enumerate(tree.parent):
        if p >= 0:
            a[p, v] = 1.0
            a[v, p] = 1.0
    return a


def enumerate_directed_trees(n: int) -> Iterator[DirectedTree]:
    """Yield every directed tree on ``n`` labelled vertices exactly once.

    Iterates all ``n^(n-2)`` Pruefer codes crossed with all ``n`` roots;
    guarded to small ``n`` because the count explodes as ``n^(n-1)``.
    """
    if not 2 <= n <= 8:
        raise UnsupportedSizeError("exhaustive enumeration supports 2 <= n <= 8")
    for sym in itertools.product(range(n), repeat=n - 2):
        for root in range(n):
            yield decode_extended_pruefer(ExtendedPrueferCode(sym, root))


def pack_codes(codes: Sequence[ExtendedPrueferCode]) -> tuple[np.ndarray, np.ndarray]:
    """Pack codes into the padded int64 row layout the kernels consume.

    Row ``i`` holds the ``ns[i]-2`` sequence symbols followed by the root id
    in column ``ns[i]-2``; trailing columns are padding (-1).
    """
    ns = np.array([c.n for c in codes], dtype=np.int64)
    width = int(ns.max()) - 1
    packed = np.full((len(codes), width), -1, dtype=np.int64)
    for i, c in enumerate(codes):
        if c.code:
            packed[i, : len(c.code)] = c.code
        packed[i, len(c.code)] = c.root
    return packed, ns


def pack_parents(trees: Sequence[DirectedTree]) -> tuple[np.ndarray, np.ndarray]:
    """Pack parent arrays into padded kernel rows (padding value -2)."""
    ns = np.array([t.n for t in trees], dtype=np.int64)
    width = int(ns.max())
    packed = np.full((len(trees), width), -2, dtype=np.int64)
    for i, t in enumerate(trees):
        packed[i, : t.n] = t.parent
    return packed, ns


def tree_from_parent_row(row: np.ndarray, n: int) -> DirectedTree:
    return DirectedTree.from_parents([int(x) for x in row[:n]])
