"""CART decision trees (Gini impurity) and random forests."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import RmtlesError
from .dataset import Dataset

LEAF = -1


@dataclass
class TreeModel:
    """Flat array representation; node 0 is the root.

    Internal nodes send ``x[feature] <= threshold`` left.  ``counts`` holds the
    training class counts reaching each node.
    """

    classes: tuple
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    kind = "tree"

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    @property
    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for i in range(self.n_nodes):  # children always follow their parent
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def leaf_index(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        node = np.zeros(len(x), dtype=int)
        active = self.feature[node] != LEAF
        while active.any():
            rows = np.flatnonzero(active)
            nd = node[rows]
            go_left = x[rows, self.feature[nd]] <= self.threshold[nd]
            node[rows] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] != LEAF
        return node

    def predict_index(self, x) -> np.ndarray:
        return np.argmax(self.counts[self.leaf_index(x)], axis=1)

    def predict(self, x) -> np.ndarray:
        return np.asarray(self.classes)[self.predict_index(x)]

    def to_params(self) -> dict:
        return {
            "classes": list(self.classes),
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_params(cls, p) -> "TreeModel":
        return cls(
            tuple(p["classes"]),
            np.asarray(p["feature"], dtype=int),
            np.asarray(p["threshold"], dtype=float),
            np.asarray(p["left"], dtype=int),
            np.asarray(p["right"], dtype=int),
            np.asarray(p["counts"], dtype=float).reshape(len(p["feature"]), len(p["classes"])),
        )


def _gini(counts, totals):
    with np.errstate(invalid="ignore", divide="ignore"):
        p = counts / totals[:, None]
    return 1.0 - np.sum(p * p, axis=1)


def _best_split(x, y, k, features, min_leaf):
    """Lowest weighted child Gini over ``features``; ties keep the earlier feature/threshold."""
    n = len(y)
    onehot = np.eye(k)[y]
    best = None
    for f in features:
        col = x[:, f]
        order = np.argsort(col, kind="stable")
        xs = col[order]
        left = np.cumsum(onehot[order], axis=0)[:-1]  # left counts for split after position i
        n_left = np.arange(1, n, dtype=float)
        valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n - n_left >= min_leaf)
        if not valid.any():
            continue
        right = left[-1] + onehot[order[-1]] - left
        score = (n_left * _gini(left, n_left) + (n - n_left) * _gini(right, n - n_left)) / n
        score = np.where(valid, score, np.inf)
        i = int(np.argmin(score))
        if best is None or score[i] < best[0]:
            lo, hi = xs[i], xs[i + 1]
            thr = 0.5 * (lo + hi)
            if not lo <= thr < hi:
                thr = lo
            best = (float(score[i]), int(f), float(thr))
    return best


def _grow(x, y, k, max_depth, min_leaf, max_features, rng) -> tuple:
    d = x.shape[1]
    feature, threshold, left, right, counts = [], [], [], [], []

    def new_node(idx):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(np.bincount(y[idx], minlength=k).astype(float))
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        c = counts[node]
        if (max_depth is not None and depth >= max_depth) or np.count_nonzero(c) <= 1 or len(idx) < 2 * min_leaf:
            continue
        if max_features is None or max_features >= d:
            feats = np.arange(d)
        else:
            feats = np.sort(rng.choice(d, size=max_features, replace=False))
        split = _best_split(x[idx], y[idx], k, feats, min_leaf)
        if split is None:
            continue
        _, f, thr = split
        go_left = x[idx, f] <= thr
        li, ri = idx[go_left], idx[~go_left]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return (
        np.asarray(feature, dtype=int),
        np.asarray(threshold, dtype=float),
        np.asarray(left, dtype=int),
        np.asarray(right, dtype=int),
        np.asarray(counts, dtype=float),
    )


def _encode(ds: Dataset):
    classes = ds.classes
    return classes, np.searchsorted(classes, ds.labels)


def train_tree(ds: Dataset, max_depth: Optional[int] = None, min_leaf: int = 1) -> TreeModel:
    if len(ds) == 0:
        raise RmtlesError("empty dataset")
    if min_leaf < 1:
        raise RmtlesError("min_leaf must be >= 1")
    classes, y = _encode(ds)
    return TreeModel(classes, *_grow(ds.rows, y, len(classes), max_depth, min_leaf, None, None))


@dataclass
class ForestModel:
    classes: tuple
    trees: list
    seeds: list

    kind = "forest"

    def predict(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        votes = np.zeros((len(x), len(self.classes)))
        rows = np.arange(len(x))
        for t in self.trees:
            # trees may have seen only a subset of classes
            mapping = np.searchsorted(self.classes, t.classes)
            votes[rows, mapping[t.predict_index(x)]] += 1
        return np.asarray(self.classes)[np.argmax(votes, axis=1)]

    def to_params(self) -> dict:
        return {"classes": list(self.classes), "seeds": list(self.seeds), "trees": [t.to_params() for t in self.trees]}

    @classmethod
    def from_params(cls, p) -> "ForestModel":
        return cls(tuple(p["classes"]), [TreeModel.from_params(t) for t in p["trees"]], list(p["seeds"]))


def canonical_order(ds: Dataset) -> np.ndarray:
    """Row permutation sorting by features (first column primary), then label."""
    keys = [ds.labels] + [ds.rows[:, j] for j in range(ds.n_features - 1, -1, -1)]
    return np.lexsort(keys)


def resolve_max_features(feature_subsample, d: int) -> int:
    if feature_subsample in (None, "all"):
        return d
    if feature_subsample == "sqrt":
        return max(1, int(math.sqrt(d)))
    if isinstance(feature_subsample, float) and 0 < feature_subsample <= 1:
        return max(1, int(round(feature_subsample * d)))
    m = int(feature_subsample)
    if not 1 <= m:
        raise RmtlesError(f"invalid feature_subsample {feature_subsample!r}")
    return min(m, d)


def train_forest(
    ds: Dataset,
    n_trees: int = 100,
    feature_subsample="sqrt",
    seed: int = 0,
    *,
    bootstrap: bool = True,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
) -> ForestModel:
    """Bagged CART trees with per-split feature subsampling and majority vote.

    Rows are put in canonical order first and tree ``i`` draws its bootstrap
    sample and feature subsets from its own stream spawned from ``seed``, so
    the forest depends only on the multiset of training rows.
    """
    if n_trees < 1:
        raise RmtlesError("n_trees must be >= 1")
    if len(ds) == 0:
        raise RmtlesError("empty dataset")
    ds = ds.subset(canonical_order(ds))
    classes = ds.classes
    max_features = resolve_max_features(feature_subsample, ds.n_features)
    streams = np.random.SeedSequence(seed).spawn(n_trees)
    trees, seeds = [], []
    for ss in streams:
        rng = np.random.default_rng(ss)
        idx = rng.integers(0, len(ds), size=len(ds)) if bootstrap else np.arange(len(ds))
        sub = ds.subset(np.sort(idx))
        sub_classes, y = _encode(sub)
        arrays = _grow(sub.rows, y, len(sub_classes), max_depth, min_leaf, max_features, rng)
        trees.append(TreeModel(sub_classes, *arrays))
        seeds.append(list(ss.spawn_key))
    return ForestModel(classes, trees, seeds)
