"""Random forest of Gini CART trees for binary labels {0, 1}.

Trees grow until leaves are pure (or cannot be split); each split looks
at ``ceil(sqrt(d))`` randomly chosen non-constant features and picks the
midpoint threshold with the largest Gini decrease.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..rng import make_rng


class TrainingError(ValueError):
    pass


def gini(counts) -> float:
    """``1 - sum p_c^2`` over class counts; 0 for an empty node."""
    c = np.asarray(counts, dtype=float)
    tot = c.sum()
    if tot == 0:
        return 0.0
    p = c / tot
    return float(1.0 - (p * p).sum())


@dataclass
class DecisionTree:
    feature: np.ndarray    # -1 at leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray      # predicted label at leaves

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        node = np.zeros(len(x), dtype=np.int64)
        rows = np.arange(len(x))
        active = self.feature[node] >= 0
        while active.any():
            r, nd = rows[active], node[active]
            go_left = x[r, self.feature[nd]] <= self.threshold[nd]
            node[r] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return self.value[node]


def _best_split(x, y, feats):
    """Best (gain-ordered) split over ``feats``; returns (feature, threshold) or None."""
    n = len(y)
    sub = x[:, feats]
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    ys = y[order]
    left_pos = np.cumsum(ys, axis=0)[:-1]                # positives among the first i+1
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    tot_pos = y.sum()
    right_pos = tot_pos - left_pos
    # weighted child impurity times n: n_l*(1 - pl^2 - (1-pl)^2) = 2*pos_l*neg_l/n_l
    imp = 2.0 * left_pos * (n_left - left_pos) / n_left + 2.0 * right_pos * (n_right - right_pos) / n_right
    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return None
    imp = np.where(valid, imp, np.inf)
    flat = int(np.argmin(imp))        # first minimum in (row, feature) order
    i, f = divmod(flat, len(feats))
    return int(feats[f]), 0.5 * (xs[i, f] + xs[i + 1, f])


def _grow(x, y, rng, max_features: int, min_leaf: int) -> DecisionTree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0)
        return len(feature) - 1

    root = new_node()
    stack = [(root, np.arange(len(y)))]
    while stack:
        nid, idx = stack.pop()
        yn = y[idx]
        pos = int(yn.sum())
        value[nid] = 1 if 2 * pos > len(yn) else 0    # ties go to label 0
        if pos == 0 or pos == len(yn) or len(yn) < 2 * min_leaf:
            continue
        xn = x[idx]
        nonconst = np.flatnonzero(xn.max(axis=0) > xn.min(axis=0))
        if len(nonconst) == 0:
            continue
        feats = nonconst if len(nonconst) <= max_features else \
            np.sort(rng.choice(nonconst, size=max_features, replace=False))
        best = _best_split(xn, yn, feats)
        if best is None:
            continue
        f, t = best
        mask = xn[:, f] <= t
        if min_leaf > 1 and min(mask.sum(), (~mask).sum()) < min_leaf:
            continue
        feature[nid], threshold[nid] = f, t
        left[nid], right[nid] = new_node(), new_node()
        stack.append((right[nid], idx[~mask]))
        stack.append((left[nid], idx[mask]))
    return DecisionTree(np.array(feature, dtype=np.int64), np.array(threshold),
                        np.array(left, dtype=np.int64), np.array(right, dtype=np.int64),
                        np.array(value, dtype=np.int64))


@dataclass
class Forest:
    trees: list[DecisionTree]

    @property
    def n_trees(self) -> int:
        return len(self.trees)

    def votes(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.sum([t.predict(x) for t in self.trees], axis=0)

    def predict(self, x) -> np.ndarray:
        """Majority vote; an exact tie predicts 0 (non-identical)."""
        return (2 * self.votes(x) > self.n_trees).astype(np.int64)


def fit_forest(x, y, n_trees: int = 100, seed: int = 0, max_features: int | None = None,
               min_leaf: int = 1, bootstrap: bool = True) -> Forest:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if x.ndim != 2 or len(x) != len(y) or len(y) == 0:
        raise TrainingError("x must be 2-D with one row per label")
    if len(np.unique(y)) < 2:
        raise TrainingError(f"training set has a single label ({int(y[0])})")
    if n_trees < 1:
        raise TrainingError("n_trees must be >= 1")
    mf = max_features or max(1, math.ceil(math.sqrt(x.shape[1])))
    rng = make_rng(seed, "forest")
    n = len(y)
    trees = []
    for _ in range(n_trees):
        idx = rng.integers(n, size=n) if bootstrap else np.arange(n)
        trees.append(_grow(x[idx], y[idx], rng, mf, min_leaf))
    return Forest(trees)


def train_forest(s, n_trees: int = 100, seed: int = 0, **kw) -> Forest:
    """Fit a forest on a SampleSet's training rows."""
    x, y = s.train_xy()
    return fit_forest(x, y, n_trees, seed, **kw)
