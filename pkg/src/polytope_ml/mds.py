"""Metric multidimensional scaling by stress majorization (SMACOF).

Minimises the raw stress ``S = sqrt(sum_{i<j} (D_ij - d_ij)^2)`` between
input distances ``D`` and embedded distances ``d`` with unit weights, where
each Guttman transform can only lower it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class Embedding:
    points: np.ndarray
    stress: float
    n_iter: int
    stress_log: list[float] = field(default_factory=list)


def distance_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    sq = (X * X).sum(axis=1)
    D2 = sq[:, None] + sq[None, :] - 2.0 * X @ X.T
    np.maximum(D2, 0.0, out=D2)
    np.fill_diagonal(D2, 0.0)
    return np.sqrt(D2)


def stress(D, Y) -> float:
    iu = np.triu_indices(len(D), 1)
    return float(np.sqrt(((D[iu] - distance_matrix(Y)[iu]) ** 2).sum()))


def _guttman(D, Y):
    n = len(D)
    d = distance_matrix(Y)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d > 0, D / d, 0.0)
    B = -ratio
    np.fill_diagonal(B, 0.0)
    np.fill_diagonal(B, -B.sum(axis=1))
    return B @ Y / n


def _gauge(Y):
    Y = Y - Y.mean(axis=0)
    if Y.shape[1] == 2:
        # rotate onto principal axes (proper rotation), then fix signs by skewness
        _, vecs = np.linalg.eigh(Y.T @ Y)
        R = vecs[:, ::-1]
        if np.linalg.det(R) < 0:
            R[:, 1] = -R[:, 1]
        Y = Y @ R
        if (Y[:, 0] ** 3).sum() < 0:
            Y = -Y
    elif (Y[:, 0] ** 3).sum() < 0:
        Y = -Y
    return Y


def mds_embed(features, k: int = 2, max_iter: int = 300, tol: float = 1e-9, seed=None) -> Embedding:
    """Embed the rows of ``features`` in ``R^k``.

    Starts from a seeded random configuration and stops once the relative
    stress decrease drops below ``tol`` or after ``max_iter`` transforms. The
    output is centred; for ``k == 2`` it is also rotated onto its principal
    axes, and in both cases reflected so the first axis has positive skew.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or len(X) < 2:
        raise ValueError("need at least two equally long feature vectors")
    if k not in (1, 2):
        raise ValueError("k must be 1 or 2")
    D = distance_matrix(X)
    n = len(D)
    if not D.any():
        return Embedding(np.zeros((n, k)), 0.0, 0, [0.0])
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((n, k)) * (D.max() / 2)
    Y -= Y.mean(axis=0)
    log = [stress(D, Y)]
    it = 0
    for it in range(1, max_iter + 1):
        Y = _guttman(D, Y)
        s = stress(D, Y)
        log.append(s)
        if log[-2] - s <= tol * max(log[-2], 1e-300):
            break
    return Embedding(_gauge(Y), log[-1], it, log)
