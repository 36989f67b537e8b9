"""Distribution summaries and comparisons.

Each (h_ks, h_deg) sample is summarized by a bivariate Gaussian; distances
between conditions use the closed-form Gaussian KLD in nats.  A bootstrap
"zero" baseline (sample vs its own resampling) gives the floor against
which those KLDs are judged.  Binary logistic classifiers on the
normalized measures quantify per-sentence separability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    DegenerateDistributionError,
    DegenerateLabelsError,
    InsufficientSampleError,
    SampleSizeError,
)

__all__ = [
    "GaussianSummary",
    "ClassifierModel",
    "fit_gaussian",
    "kld_gaussian",
    "bootstrap_zero",
    "downsample",
    "paired_t",
    "logistic_irls",
    "train_logistic",
    "evaluate_logistic",
    "classifier_experiment",
]

_RIDGE_SCALE = 1e-10


@dataclass(frozen=True, eq=False)
class GaussianSummary:
    """Mean vector and covariance of a (h_ks, h_deg) sample."""

    mu: np.ndarray
    sigma: np.ndarray
    n: int

    @property
    def is_degenerate(self) -> bool:
        return bool(np.linalg.det(self.sigma) <= 0.0)


def fit_gaussian(samples) -> GaussianSummary:
    """Sample mean and covariance (n-1 denominator) of (h_ks, h_deg) pairs."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError("samples must have shape (n, 2)")
    if x.shape[0] < 3 or not np.isfinite(x).all():
        raise InsufficientSampleError("need at least 3 finite samples")
    return GaussianSummary(x.mean(axis=0), np.cov(x, rowvar=False, ddof=1), x.shape[0])


def _regularized(cov: np.ndarray) -> np.ndarray:
    # near-constant samples are ridged back to invertibility; a hard error
    # is left to the caller when even that fails
    cov = np.asarray(cov, dtype=float)
    if np.linalg.det(cov) > 0.0 and np.linalg.cond(cov) < 1e12:
        return cov
    return cov + _RIDGE_SCALE * np.trace(cov) * np.eye(cov.shape[0])


def kld_gaussian(p: GaussianSummary, q: GaussianSummary) -> float:
    """Closed-form KLD D(P||Q) between bivariate Gaussians, in nats."""
    if p.mu.shape != q.mu.shape:
        raise ValueError("dimension mismatch")
    if np.array_equal(p.mu, q.mu) and np.array_equal(p.sigma, q.sigma):
        return 0.0
    sig_p = _regularized(p.sigma)
    sig_q = _regularized(q.sigma)
    det_p = np.linalg.det(sig_p)
    det_q = np.linalg.det(sig_q)
    if det_p <= 0.0 or det_q <= 0.0:
        raise DegenerateDistributionError("covariance singular even after ridging")
    q_inv = np.linalg.inv(sig_q)
    d = q.mu - p.mu
    k = p.mu.shape[0]
    return 0.5 * float(np.trace(q_inv @ sig_p) - k + d @ q_inv @ d + math.log(det_q / det_p))


def bootstrap_zero(samples, rng: np.random.Generator, reps: int = 100) -> float:
    """Mean KLD between a sample and its own resampling with replacement."""
    x = np.asarray(samples, dtype=float)
    if reps < 1:
        raise ValueError("reps must be >= 1")
    p = fit_gaussian(x)
    total = 0.0
    for _ in range(reps):
        idx = rng.integers(0, x.shape[0], x.shape[0])
        total += kld_gaussian(p, fit_gaussian(x[idx]))
    return total / reps


def downsample(samples, target_n: int, rng: np.random.Generator):
    """Uniform subsample without replacement, size target_n."""
    x = np.asarray(samples)
    if target_n > x.shape[0]:
        raise SampleSizeError("target %d exceeds sample size %d" % (target_n, x.shape[0]))
    return x[rng.choice(x.shape[0], size=target_n, replace=False)]


def paired_t(a, b) -> tuple[float, int]:
    """Paired t statistic and degrees of freedom for two matched samples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.shape[0] < 2:
        raise ValueError("need two equal-length 1-D samples with n >= 2")
    d = a - b
    sd = d.std(ddof=1)
    if sd == 0.0:
        raise DegenerateDistributionError("paired differences have zero variance")
    n = d.shape[0]
    return float(d.mean() / (sd / math.sqrt(n))), n - 1


class ClassifierModel(NamedTuple):
    """Binary logistic model over the normalized (H_ks, H_deg) features."""

    weights: np.ndarray
    bias: float

    def predict_proba(self, features) -> np.ndarray:
        z = np.asarray(features, dtype=float) @ self.weights + self.bias
        return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))

    def predict(self, features) -> np.ndarray:
        return (self.predict_proba(features) >= 0.5).astype(int)


def _penalized_nll(theta, x_design, y, l2):
    z = np.clip(x_design @ theta, -500, 500)
    p = 1.0 / (1.0 + np.exp(-z))
    p = np.clip(p, 1e-12, 1.0 - 1e-12)
    return float(-(y * np.log(p) + (1 - y) * np.log(1 - p)).sum() + 0.5 * l2 * (theta @ theta))


def logistic_irls(features, labels, l2: float = 1e-6, tol: float = 1e-8,
                  max_iter: int = 100) -> tuple[ClassifierModel, list[float]]:
    """Fit by iteratively reweighted least squares; returns (model, loss path).

    Newton steps are halved whenever the penalized loss would increase, so
    the recorded loss path is non-increasing.  Convergence is declared when
    the applied parameter change drops below ``tol``.
    """
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=float)
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateLabelsError("training data contains a single class")
    if not np.isin(classes, (0.0, 1.0)).all():
        raise ValueError("labels must be 0/1")
    design = np.column_stack([np.ones(x.shape[0]), x])
    theta = np.zeros(design.shape[1])
    losses = [_penalized_nll(theta, design, y, l2)]
    for _ in range(max_iter):
        z = np.clip(design @ theta, -500, 500)
        p = 1.0 / (1.0 + np.exp(-z))
        w = np.maximum(p * (1.0 - p), 1e-10)
        grad = design.T @ (p - y) + l2 * theta
        hess = design.T @ (w[:, None] * design) + l2 * np.eye(design.shape[1])
        step = np.linalg.solve(hess, grad)
        # step-halving keeps the loss path monotone on badly scaled data
        for _ in range(40):
            candidate = theta - step
            loss = _penalized_nll(candidate, design, y, l2)
            if loss <= losses[-1]:
                break
            step = step / 2.0
        theta = candidate
        losses.append(loss)
        if float(np.max(np.abs(step))) < tol:
            break
    return ClassifierModel(theta[1:], float(theta[0])), losses


def _split_90_10(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    order = rng.permutation(n)
    cut = max(1, int(round(0.1 * n)))
    return order[cut:], order[:cut]


def train_logistic(features, labels, rng: np.random.Generator) -> ClassifierModel:
    """Fit on a seeded 90% split; evaluate_logistic scores any held-out data."""
    model, _ = classifier_experiment(features, labels, rng)
    return model


def evaluate_logistic(model: ClassifierModel, features, labels) -> float:
    y = np.asarray(labels)
    return float((model.predict(features) == y).mean())


def classifier_experiment(features, labels,
                          rng: np.random.Generator) -> tuple[ClassifierModel, float]:
    """Seeded 90/10 split; returns the trained model and held-out accuracy."""
    x = np.asarray(features, dtype=float)
    y = np.asarray(labels)
    train_idx, test_idx = _split_90_10(x.shape[0], rng)
    if np.unique(y[train_idx]).size < 2:
        raise DegenerateLabelsError("training split contains a single class")
    model, _ = logistic_irls(x[train_idx], y[train_idx])
    return model, evaluate_logistic(model, x[test_idx], y[test_idx])
