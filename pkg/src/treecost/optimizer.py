"""Mutation-only genetic search maximizing the noisy efficiency functional.

Every generation mutates one symbol of every member's extended Pruefer
code and keeps the mutant iff

    rho * dh_ks - (1 - rho) * dh_deg + eps > 0,     eps ~ N(0, sigma),

with eps drawn independently per member per epoch.  With sigma = 0 this is
a strict hill climb, so each member's rho*h_ks - (1-rho)*h_deg score is
monotonically non-decreasing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import _backend
from .errors import DegenerateSizeError
from .measures import CostPair, EntropyExtremaTable, normalize_arrays
from .trees import DirectedTree, ExtendedPrueferCode, encode_extended_pruefer, pack_codes

__all__ = [
    "OptimizerConfig",
    "Member",
    "Population",
    "Trajectory",
    "mutate_code",
    "delta_lambda",
    "lambda_score",
    "population_from_codes",
    "population_from_trees",
    "run",
    "write_trajectory",
]


@dataclass(frozen=True)
class OptimizerConfig:
    rho: float = 0.9
    sigma: float = 0.075
    epochs: int = 400
    record_every: int = 1

    def __post_init__(self):
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must lie in (0, 1)")
        if self.sigma < 0.0:
            raise ValueError("sigma must be >= 0")
        if self.epochs < 1 or self.record_every < 1:
            raise ValueError("epochs and record_every must be >= 1")


class Member(NamedTuple):
    code: ExtendedPrueferCode
    cost: CostPair


@dataclass(frozen=True)
class Population:
    members: tuple[Member, ...]
    epoch: int = 0


@dataclass(frozen=True)
class Trajectory:
    """Mean normalized costs of the population at the recorded epochs."""

    epochs: tuple[int, ...]
    mean_H_deg: tuple[float, ...]
    mean_H_ks: tuple[float, ...]


def mutate_code(code: ExtendedPrueferCode, rng: np.random.Generator) -> ExtendedPrueferCode:
    """Replace one uniformly chosen symbol (root included) with a different value."""
    n = code.n
    symbols = list(code.code) + [code.root]
    pos = int(rng.integers(0, n - 1))
    offset = int(rng.integers(1, n))
    symbols[pos] = (symbols[pos] + offset) % n
    return ExtendedPrueferCode(tuple(symbols[:-1]), symbols[-1])


def delta_lambda(old: CostPair, new: CostPair, rho: float, epsilon: float) -> float:
    """Discrete fitness gradient; the caller accepts the mutant iff > 0."""
    return rho * (new.h_ks - old.h_ks) - (1.0 - rho) * (new.h_deg - old.h_deg) + epsilon


def lambda_score(cost: CostPair, rho: float) -> float:
    """Noise-free part of the efficiency functional."""
    return rho * cost.h_ks - (1.0 - rho) * cost.h_deg


def population_from_codes(codes: Sequence[ExtendedPrueferCode], epoch: int = 0) -> Population:
    packed, ns = pack_codes(codes)
    parents = _backend.decode_codes(packed, ns)
    h_ks, h_deg = _backend.costs_from_parents(parents, ns)
    members = tuple(
        Member(c, CostPair(float(h_ks[i]), float(h_deg[i]))) for i, c in enumerate(codes)
    )
    return Population(members, epoch)


def population_from_trees(trees: Iterable[DirectedTree], epoch: int = 0) -> Population:
    return population_from_codes([encode_extended_pruefer(t) for t in trees], epoch)


def run(initial: Population, config: OptimizerConfig, table: EntropyExtremaTable,
        rng: np.random.Generator) -> tuple[Population, Trajectory]:
    """Evolve the population for config.epochs generations.

    Deterministic given (rng state, config, initial population).  The
    trajectory records population means of the normalized measures every
    ``record_every`` epochs, which requires every member to have n >= 4.
    """
    members = initial.members
    if not members:
        raise ValueError("population is empty")
    codes = [m.code for m in members]
    packed, ns = pack_codes(codes)
    if int(ns.min()) < 4:
        raise DegenerateSizeError("trajectory normalization needs all member sizes >= 4")
    h_ks = np.array([m.cost.h_ks for m in members])
    h_deg = np.array([m.cost.h_deg for m in members])
    b = len(members)
    rec_epochs: list[int] = []
    rec_deg: list[float] = []
    rec_ks: list[float] = []
    for e in range(1, config.epochs + 1):
        pos = rng.integers(0, ns - 1)
        offset = rng.integers(1, ns)
        eps = rng.normal(0.0, config.sigma, b)
        _backend.ga_epoch(packed, ns, h_ks, h_deg, pos, offset, eps, config.rho)
        if e % config.record_every == 0:
            big_ks, big_deg = normalize_arrays(h_ks, h_deg, ns, table)
            rec_epochs.append(initial.epoch + e)
            rec_deg.append(float(big_deg.mean()))
            rec_ks.append(float(big_ks.mean()))
    out_members = []
    for i in range(b):
        n = int(ns[i])
        row = packed[i]
        code = ExtendedPrueferCode(tuple(int(s) for s in row[: n - 2]), int(row[n - 2]))
        out_members.append(Member(code, CostPair(float(h_ks[i]), float(h_deg[i]))))
    final = Population(tuple(out_members), initial.epoch + config.epochs)
    return final, Trajectory(tuple(rec_epochs), tuple(rec_deg), tuple(rec_ks))


TRAJECTORY_SCHEMA = "epoch,mean_H_deg,mean_H_ks"


def write_trajectory(trajectory: Trajectory, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# %s\n" % TRAJECTORY_SCHEMA)
        for e, d, k in zip(trajectory.epochs, trajectory.mean_H_deg, trajectory.mean_H_ks):
            fh.write("%d,%.12g,%.12g\n" % (e, d, k))
