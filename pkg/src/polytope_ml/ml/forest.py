"""Random forest of CART trees for binary classification.

Each tree is grown on a bootstrap sample to purity, choosing the Gini-best
threshold among ``round(sqrt(F))`` randomly drawn features at every node.
If none of those features can split the node, the remaining features are
tried in random order before the node becomes a leaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class DecisionTree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    votes: np.ndarray  # (n_nodes, 2) class counts

    def apply(self, X) -> np.ndarray:
        node = np.zeros(len(X), dtype=int)
        active = self.feature[node] >= 0
        while active.any():
            idx = np.nonzero(active)[0]
            nd = node[idx]
            go_left = X[idx, self.feature[nd]] <= self.threshold[nd]
            node[idx] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def predict_proba(self, X) -> np.ndarray:
        v = self.votes[self.apply(X)].astype(float)
        return v[:, 1] / v.sum(axis=1)


@dataclass
class RandomForestModel:
    trees: list[DecisionTree]
    seeds: list[tuple]  # spawn keys of the per-tree seed sequences
    n_features: int
    bootstraps: list[np.ndarray] = field(default_factory=list)

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        return np.mean([t.predict_proba(X) for t in self.trees], axis=0)

    def predict(self, X) -> np.ndarray:
        # majority of per-tree votes; ties go to class 1
        X = np.asarray(X, dtype=float)
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        votes = np.mean([t.predict_proba(X) > 0.5 for t in self.trees], axis=0)
        return (votes >= 0.5).astype(int)

    def oob_indices(self, n: int, i: int) -> np.ndarray:
        """Training rows left out of tree ``i``'s bootstrap sample."""
        mask = np.ones(n, dtype=bool)
        mask[self.bootstraps[i]] = False
        return np.nonzero(mask)[0]


def _best_split(x, y):
    """Best Gini threshold on one feature: ``(impurity, threshold)`` or None."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    n = len(xs)
    cuts = np.nonzero(xs[1:] != xs[:-1])[0]
    if len(cuts) == 0:
        return None
    ones_left = np.cumsum(ys)[cuts]
    n_left = cuts + 1
    n_right = n - n_left
    ones_right = ys.sum() - ones_left
    p_l = ones_left / n_left
    p_r = ones_right / n_right
    # weighted Gini: n_l * 2 p_l (1 - p_l) + n_r * 2 p_r (1 - p_r)
    imp = n_left * p_l * (1 - p_l) + n_right * p_r * (1 - p_r)
    j = int(np.argmin(imp))
    c = cuts[j]
    return float(imp[j]), 0.5 * (xs[c] + xs[c + 1])


def grow_tree(X, y, rng, max_features=None, min_samples_split=2) -> DecisionTree:
    n, F = X.shape
    m = max(1, int(round(np.sqrt(F)))) if max_features is None else max_features
    feature, threshold, left, right, votes = [], [], [], [], []

    def new_node(idx):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        ones = int(y[idx].sum())
        votes.append((len(idx) - ones, ones))
        return len(feature) - 1

    root = new_node(np.arange(n))
    stack = [(root, np.arange(n))]
    while stack:
        node, idx = stack.pop()
        ones = votes[node][1]
        if ones == 0 or ones == len(idx) or len(idx) < min_samples_split:
            continue
        order = rng.permutation(F)
        best = None
        # draw m features; only look further if none of them separates anything
        for start in range(0, F, m):
            for f in order[start : start + m]:
                s = _best_split(X[idx, f], y[idx])
                if s is not None and (best is None or s[0] < best[0]):
                    best = (s[0], int(f), s[1])
            if best is not None:
                break
        if best is None:
            continue
        _, f, thr = best
        mask = X[idx, f] <= thr
        feature[node], threshold[node] = f, thr
        li, ri = new_node(idx[mask]), new_node(idx[~mask])
        left[node], right[node] = li, ri
        stack.append((ri, idx[~mask]))
        stack.append((li, idx[mask]))
    return DecisionTree(
        np.array(feature), np.array(threshold), np.array(left), np.array(right), np.array(votes, dtype=int)
    )


def train_random_forest(X, y, trees: int = 70, seed=None, max_features=None) -> RandomForestModel:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y).astype(int)
    if trees < 1:
        raise ValueError("need at least one tree")
    if not set(np.unique(y)) <= {0, 1}:
        raise ValueError("random forest expects binary labels in {0, 1}")
    if len(np.unique(y)) < 2:
        raise ValueError("degenerate labels: only one class present")
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(trees)
    out, boots = [], []
    n = len(y)
    for child in children:
        rng = np.random.default_rng(child)
        boot = rng.integers(0, n, size=n)
        boots.append(boot)
        out.append(grow_tree(X[boot], y[boot], rng, max_features))
    return RandomForestModel(out, [c.spawn_key for c in children], X.shape[1], boots)
