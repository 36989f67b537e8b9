"""The two cost measures, their exact per-size extrema, and normalization.

``h_deg`` is the Shannon entropy (bits) of a tree's out-degree histogram,
a production-side cost.  ``h_ks`` is log2 of the spectral radius of the
undirected skeleton's adjacency matrix, a comprehension-side cost.  Both
depend on the vertex count, so comparisons across sizes use a per-size
min/max rescaling onto [0, 1] driven by a precomputed extrema table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DegenerateSizeError,
    UnsupportedSizeError,
)
from .trees import DirectedTree, undirected_adjacency

__all__ = [
    "CostPair",
    "NormalizedCostPair",
    "ExtremaRow",
    "EntropyExtremaTable",
    "h_deg",
    "h_ks",
    "cost_pair",
    "spectral_radius",
    "max_h_deg",
    "max_h_deg_worklist",
    "min_h_deg",
    "max_h_ks",
    "min_h_ks",
    "build_extrema_table",
    "normalize",
    "normalize_arrays",
    "write_extrema_table",
    "read_extrema_table",
]


class CostPair(NamedTuple):
    h_ks: float
    h_deg: float


class NormalizedCostPair(NamedTuple):
    H_ks: float
    H_deg: float


def h_deg(tree: DirectedTree) -> float:
    """Out-degree entropy in bits; 0*log(0) terms contribute nothing."""
    deg = np.bincount(np.array(tree.out_degrees()))
    p = deg[deg > 0] / tree.n
    return float(-(p * np.log2(p)).sum())


def spectral_radius(adjacency: np.ndarray, tol: float = 1e-10,
                    residual_tol: float = 1e-9, max_iter: int | None = None) -> float:
    """Largest eigenvalue of a connected graph's adjacency matrix.

    Power iteration on A + I: trees are bipartite, so A itself has the
    +/-lambda symmetric spectrum that defeats plain power iteration, while
    the shift makes the Perron eigenvalue strictly dominant.  Iterates from
    a strictly positive vector until the eigenvalue estimate moves less
    than ``tol`` and the eigenpair residual ||Av - lv||_inf is below
    ``residual_tol``; raises ConvergenceError at the iteration cap.
    """
    a = np.asarray(adjacency, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("adjacency must be square")
    if max_iter is None:
        max_iter = 10 * n * n
    v = np.full(n, 1.0 / math.sqrt(n))
    prev = math.inf
    for _ in range(max_iter):
        w = a @ v + v
        lam = float(v @ w)
        residual = float(np.max(np.abs(w - lam * v)))
        v = w / np.linalg.norm(w)
        if abs(lam - prev) < tol and residual < residual_tol:
            return lam - 1.0
        prev = lam
    raise ConvergenceError(
        "power iteration did not reach residual %g in %d steps" % (residual_tol, max_iter)
    )


def h_ks(tree: DirectedTree) -> float:
    """log2 spectral radius of the undirected skeleton, in bits."""
    if tree.n < 2:
        raise UnsupportedSizeError("h_ks needs n >= 2")
    return math.log2(spectral_radius(undirected_adjacency(tree)))


def cost_pair(tree: DirectedTree) -> CostPair:
    return CostPair(h_ks(tree), h_deg(tree))


def _entropy_of_partition(parts: Sequence[int], n: int) -> float:
    # histogram over out-degree values: the positive parts plus n-L zeros
    counts: dict[int, int] = {0: n - len(parts)}
    for part in parts:
        counts[part] = counts.get(part, 0) + 1
    total = 0.0
    for c in counts.values():
        if c > 0:
            p = c / n
            total -= p * math.log2(p)
    return total


def _partitions(total: int, cap: int):
    if total == 0:
        yield ()
        return
    for first in range(min(total, cap), 0, -1):
        for rest in _partitions(total - first, first):
            yield (first,) + rest


def max_h_deg(n: int) -> float:
    """Exact maximum of h_deg over all directed trees with n vertices.

    Every multiset of positive out-degrees summing to n-1 (padded with
    zero-degree vertices) is realized by some tree, so the maximum is a
    search over the integer partitions of n-1.
    """
    if n < 2:
        raise UnsupportedSizeError("max_h_deg needs n >= 2")
    best = 0.0
    for parts in _partitions(n - 1, n - 1):
        v = _entropy_of_partition(parts, n)
        if v > best:
            best = v
    return best


def max_h_deg_worklist(n: int) -> float:
    """Merge-worklist variant of max_h_deg, kept as a cross-check oracle.

    Starts from the all-ones out-degree partition and explores every merge
    of two parts, deduplicating on the sorted partition.
    """
    if n < 2:
        raise UnsupportedSizeError("max_h_deg needs n >= 2")
    start = tuple([1] * (n - 1))
    seen = {start}
    stack = [start]
    best = 0.0
    while stack:
        t = stack.pop()
        best = max(best, _entropy_of_partition(t, n))
        length = len(t)
        if length > 1:
            for i in range(length - 1):
                for j in range(i + 1, length):
                    merged = list(t)
                    merged[i] += merged[j]
                    del merged[j]
                    t2 = tuple(sorted(merged))
                    if t2 not in seen:
                        seen.add(t2)
                        stack.append(t2)
    return best


def min_h_deg(n: int) -> float:
    """Closed form: both the path and the star have n-1 equal-degree vertices."""
    if n < 2:
        raise UnsupportedSizeError("min_h_deg needs n >= 2")
    return math.log2(n) - (n - 1) / n * math.log2(n - 1)


def max_h_ks(n: int) -> float:
    """Closed form: the star's adjacency has spectral radius sqrt(n-1)."""
    if n < 2:
        raise UnsupportedSizeError("max_h_ks needs n >= 2")
    return 0.5 * math.log2(n - 1)


def _path_adjacency(n: int) -> np.ndarray:
    a = np.zeros((n, n))
    idx = np.arange(n - 1)
    a[idx, idx + 1] = 1.0
    a[idx + 1, idx] = 1.0
    return a


def min_h_ks(n: int) -> float:
    """h_ks of the n-vertex path graph, computed numerically."""
    if n < 2:
        raise UnsupportedSizeError("min_h_ks needs n >= 2")
    return math.log2(spectral_radius(_path_adjacency(n)))


class ExtremaRow(NamedTuple):
    n: int
    min_h_ks: float
    max_h_ks: float
    min_h_deg: float
    max_h_deg: float


@dataclass(frozen=True)
class EntropyExtremaTable:
    """Per-size extrema of both measures for N = 2..n_max, built once."""

    rows: tuple[ExtremaRow, ...]

    @property
    def n_max(self) -> int:
        return self.rows[-1].n

    def row(self, n: int) -> ExtremaRow:
        if not 2 <= n <= self.n_max:
            raise UnsupportedSizeError("table covers 2 <= n <= %d, got %d" % (self.n_max, n))
        return self.rows[n - 2]

    def min_h_ks(self, n: int) -> float:
        return self.row(n).min_h_ks

    def max_h_ks(self, n: int) -> float:
        return self.row(n).max_h_ks

    def min_h_deg(self, n: int) -> float:
        return self.row(n).min_h_deg

    def max_h_deg(self, n: int) -> float:
        return self.row(n).max_h_deg

    def as_arrays(self) -> dict[str, np.ndarray]:
        """Arrays indexed directly by n (entries below n=2 are NaN)."""
        out = {k: np.full(self.n_max + 1, np.nan) for k in
               ("min_h_ks", "max_h_ks", "min_h_deg", "max_h_deg")}
        for r in self.rows:
            out["min_h_ks"][r.n] = r.min_h_ks
            out["max_h_ks"][r.n] = r.max_h_ks
            out["min_h_deg"][r.n] = r.min_h_deg
            out["max_h_deg"][r.n] = r.max_h_deg
        return out


def build_extrema_table(n_max: int = 50) -> EntropyExtremaTable:
    if n_max < 4:
        raise UnsupportedSizeError("extrema table needs n_max >= 4")
    rows = tuple(
        ExtremaRow(n, min_h_ks(n), max_h_ks(n), min_h_deg(n), max_h_deg(n))
        for n in range(2, n_max + 1)
    )
    return EntropyExtremaTable(rows)


def normalize(cost: CostPair, n: int, table: EntropyExtremaTable) -> NormalizedCostPair:
    """Map both measures onto [0, 1] by their per-size extrema.

    No clamping: an out-of-range result means the caller fed a cost that
    cannot belong to a tree of this size.
    """
    if n <= 3:
        raise DegenerateSizeError(
            "all trees with n <= 3 are simultaneously path and star; "
            "normalization is undefined"
        )
    r = table.row(n)
    return NormalizedCostPair(
        (cost.h_ks - r.min_h_ks) / (r.max_h_ks - r.min_h_ks),
        (cost.h_deg - r.min_h_deg) / (r.max_h_deg - r.min_h_deg),
    )


def normalize_arrays(h_ks_values: np.ndarray, h_deg_values: np.ndarray,
                     ns: np.ndarray, table: EntropyExtremaTable) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized normalize() over per-row sizes."""
    ns = np.asarray(ns)
    if (ns <= 3).any():
        raise DegenerateSizeError("normalization is undefined for n <= 3")
    arr = table.as_arrays()
    big_ks = (h_ks_values - arr["min_h_ks"][ns]) / (arr["max_h_ks"][ns] - arr["min_h_ks"][ns])
    big_deg = (h_deg_values - arr["min_h_deg"][ns]) / (arr["max_h_deg"][ns] - arr["min_h_deg"][ns])
    return big_ks, big_deg


EXTREMA_SCHEMA = "n,min_h_ks,max_h_ks,min_h_deg,max_h_deg"


def write_extrema_table(table: EntropyExtremaTable, path) -> None:
    """Cache the table as delimited text, full double precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# %s\n" % EXTREMA_SCHEMA)
        for r in table.rows:
            fh.write("%d,%.17g,%.17g,%.17g,%.17g\n"
                     % (r.n, r.min_h_ks, r.max_h_ks, r.min_h_deg, r.max_h_deg))


def read_extrema_table(path) -> EntropyExtremaTable:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            n, a, b, c, d = line.split(",")
            rows.append(ExtremaRow(int(n), float(a), float(b), float(c), float(d)))
    rows.sort(key=lambda r: r.n)
    return EntropyExtremaTable(tuple(rows))
