"""Synthetic baseline trees and the attachment-exponent estimator.

Uniform sampling draws every symbol of an extended Pruefer code
independently, which makes all n^(n-1) directed trees equally likely.
Preferential-attachment sampling grows a tree one vertex at a time,
attaching to vertex i with probability proportional to K[i]**alpha, where
K starts at 1 and increments on every attachment received.
"""
from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InsufficientSampleError, UnsupportedSizeError
from .trees import DirectedTree, ExtendedPrueferCode, decode_extended_pruefer

__all__ = [
    "AlphaEstimate",
    "sample_uniform_directed_tree",
    "sample_pa_tree",
    "estimate_alpha",
    "alpha_hats_from_parents",
    "language_alpha",
]


class AlphaEstimate(NamedTuple):
    alpha_hat: float
    n: int
    k_max: int


def sample_uniform_directed_tree(n: int, rng: np.random.Generator) -> DirectedTree:
    """Draw one directed tree uniformly from the n^(n-1) possibilities."""
    if n < 2:
        raise UnsupportedSizeError("uniform sampling needs n >= 2")
    symbols = rng.integers(0, n, size=n - 1)
    code = ExtendedPrueferCode(tuple(int(s) for s in symbols[: n - 2]), int(symbols[n - 2]))
    return decode_extended_pruefer(code)


def sample_pa_tree(n: int, alpha: float, rng: np.random.Generator) -> DirectedTree:
    """Grow a directed tree by nonlinear preferential attachment.

    A uniformly chosen unlinked vertex joins at every step; the uniform
    root draw comes first, and within each step the new vertex is drawn
    before its attachment target (cumulative-weight inversion).
    """
    if n < 1:
        raise UnsupportedSizeError("preferential attachment needs n >= 1")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    unlinked = list(range(n))
    weight = np.ones(n)
    root = unlinked.pop(int(rng.integers(len(unlinked))))
    linked = [root]
    parent = [-2] * n
    parent[root] = -1
    while unlinked:
        newnode = unlinked.pop(int(rng.integers(len(unlinked))))
        cum = np.cumsum(weight[linked] ** alpha)
        source = linked[int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))]
        parent[newnode] = source
        linked.append(newnode)
        weight[source] += 1.0
    return DirectedTree.from_parents(parent, validate=False)


def estimate_alpha(tree: DirectedTree) -> AlphaEstimate:
    """Attachment-exponent estimate 1 - ln(ln n)/ln(k_max), natural logs.

    k_max is the maximum undirected-skeleton degree.  Negative outputs are
    legal (a path has k_max = 2); sizes below 4 are rejected because
    ln(ln n) degenerates and the corpus never supplies them.
    """
    if tree.n < 4:
        raise UnsupportedSizeError("alpha estimation needs n >= 4")
    k_max = max(tree.undirected_degrees())
    alpha = 1.0 - math.log(math.log(tree.n)) / math.log(k_max)
    return AlphaEstimate(alpha, tree.n, k_max)


def alpha_hats_from_parents(parents: np.ndarray, ns: np.ndarray) -> np.ndarray:
    """Vectorized estimate_alpha over packed parent rows (all n >= 4)."""
    parents = np.asarray(parents)
    ns = np.asarray(ns)
    if (ns < 4).any():
        raise UnsupportedSizeError("alpha estimation needs n >= 4")
    out = np.empty(len(ns))
    for i in range(len(ns)):
        n = int(ns[i])
        par = parents[i, :n]
        deg = np.bincount(par[par >= 0], minlength=n) + (par >= 0)
        out[i] = 1.0 - math.log(math.log(n)) / math.log(int(deg.max()))
    return out


def language_alpha(estimates: Iterable) -> float:
    """Arithmetic mean of alpha_hat values (AlphaEstimate or plain floats)."""
    values = [float(getattr(e, "alpha_hat", e)) for e in estimates]
    if not values:
        raise InsufficientSampleError("language_alpha needs at least one estimate")
    return sum(values) / len(values)
