"""Regression and classification metrics, and k-fold splits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import logcosh


def parse_bin(spec) -> tuple[float, bool]:
    """``"0.5"`` is an absolute half-width; ``"0.05r"`` is 0.05 times the label range."""
    s = str(spec).strip()
    if s.endswith("r"):
        return float(s[:-1]), True
    return float(s), False


def half_width(spec, label_range: float) -> float:
    h, relative = parse_bin(spec)
    return h * label_range if relative else h


def bin_name(spec) -> str:
    h, relative = parse_bin(spec)
    return f"acc_pm{h:g}range" if relative else f"acc_pm{h:g}"


@dataclass
class Metrics:
    mae: float
    mape: float
    mse: float
    logcosh: float
    pmcc: float
    pmcc_degenerate: bool = False
    accuracies: dict = field(default_factory=dict)

    def as_row(self) -> dict:
        return {"mae": self.mae, "mape": self.mape, "mse": self.mse, "logcosh": self.logcosh,
                "pmcc": self.pmcc, **self.accuracies}


def pmcc(a, b) -> tuple[float, bool]:
    """Pearson correlation; ``(0.0, True)`` if either side has zero variance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da, db = a - a.mean(), b - b.mean()
    denom = np.sqrt((da * da).sum() * (db * db).sum())
    if denom == 0:
        return 0.0, True
    return float(np.clip((da * db).sum() / denom, -1.0, 1.0)), False


def evaluate_regression(y_true, y_pred, bins=("0.5", "1", "0.025r", "0.05r"), label_range=None) -> Metrics:
    """Errors, correlation, and the fraction within each half-width of the truth.

    Relative bins are scaled by ``label_range``, by default the spread of
    ``y_true``.
    """
    y = np.asarray(y_true, dtype=float)
    p = np.asarray(y_pred, dtype=float)
    if len(y) == 0 or y.shape != p.shape:
        raise ValueError("need equally long, non-empty truth and prediction arrays")
    e = p - y
    nz = y != 0
    mape = float(np.mean(np.abs(e[nz] / y[nz])) * 100) if nz.any() else float("nan")
    rng = float(y.max() - y.min()) if label_range is None else float(label_range)
    acc = {}
    for spec in bins:
        acc[bin_name(spec)] = float(np.mean(np.abs(e) <= half_width(spec, rng) + 1e-12))
    r, degenerate = pmcc(y, p)
    return Metrics(
        mae=float(np.mean(np.abs(e))),
        mape=mape,
        mse=float(np.mean(e * e)),
        logcosh=float(np.mean(logcosh(e))),
        pmcc=r,
        pmcc_degenerate=degenerate,
        accuracies=acc,
    )


def accuracy(y_true, y_pred) -> float:
    return float(np.mean(np.asarray(y_true) == np.asarray(y_pred)))


def kfold_split(n: int, k: int = 5, seed=None, groups=None) -> list[tuple[np.ndarray, np.ndarray]]:
    """``k`` (train, test) index pairs with disjoint test folds covering ``range(n)``.

    With ``groups`` whole groups go to one fold, so augmented copies of a
    polytope never straddle train and test.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise ValueError(f"cannot split {n} records into {k} folds")
    rng = np.random.default_rng(seed)
    if groups is None:
        order = rng.permutation(n)
        folds = np.array_split(order, k)
    else:
        keys = list(dict.fromkeys(groups))
        if len(keys) < k:
            raise ValueError(f"cannot split {len(keys)} groups into {k} folds")
        perm = rng.permutation(len(keys))
        fold_of = {keys[g]: i % k for i, g in enumerate(perm)}
        folds = [np.array([i for i, g in enumerate(groups) if fold_of[g] == f], dtype=int) for f in range(k)]
    out = []
    for f in range(k):
        test = np.sort(folds[f])
        train = np.sort(np.concatenate([folds[j] for j in range(k) if j != f]))
        out.append((train, test))
    return out


def train_test_split(n: int, train_frac: float, seed=None, groups=None):
    if not 0 < train_frac < 1:
        raise ValueError("train fraction must lie strictly between 0 and 1")
    rng = np.random.default_rng(seed)
    if groups is None:
        order = rng.permutation(n)
        cut = max(1, min(n - 1, int(round(train_frac * n))))
        return np.sort(order[:cut]), np.sort(order[cut:])
    keys = list(dict.fromkeys(groups))
    perm = rng.permutation(len(keys))
    cut = max(1, min(len(keys) - 1, int(round(train_frac * len(keys)))))
    chosen = {keys[g] for g in perm[:cut]}
    train = np.array([i for i, g in enumerate(groups) if g in chosen], dtype=int)
    test = np.array([i for i, g in enumerate(groups) if g not in chosen], dtype=int)
    return train, test
