from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import RmtlesError
from .dataset import Dataset


@dataclass
class KNNModel:
    """Lazy k-nearest-neighbour classifier (Euclidean).

    Ties in the vote go to the label whose voting neighbours have the smaller
    mean distance, then to the lexicographically smaller label.  Neighbours at
    equal distance are ordered by label so the result does not depend on the
    order of the training rows.
    """

    classes: tuple
    rows: np.ndarray
    labels: np.ndarray
    k: int

    kind = "knn"

    def predict(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        label_idx = np.searchsorted(self.classes, self.labels)
        d2 = (
            np.sum(x * x, axis=1)[:, None]
            + np.sum(self.rows * self.rows, axis=1)[None, :]
            - 2.0 * x @ self.rows.T
        )
        dist = np.sqrt(np.clip(d2, 0.0, None))
        out = []
        for row in dist:
            nearest = np.lexsort((label_idx, row))[: self.k]
            lab = label_idx[nearest]
            votes = np.bincount(lab, minlength=len(self.classes))
            tied = np.flatnonzero(votes == votes.max())
            if len(tied) > 1:
                mean_d = [row[nearest][lab == t].mean() for t in tied]
                tied = tied[np.argsort(mean_d, kind="stable")]
            out.append(self.classes[tied[0]])
        return np.asarray(out, dtype=str)

    def to_params(self) -> dict:
        return {"classes": list(self.classes), "rows": self.rows.tolist(), "labels": self.labels.tolist(), "k": self.k}

    @classmethod
    def from_params(cls, p) -> "KNNModel":
        rows = np.asarray(p["rows"], dtype=float).reshape(len(p["labels"]), -1)
        return cls(tuple(p["classes"]), rows, np.asarray(p["labels"], dtype=str), int(p["k"]))


def train_knn(ds: Dataset, k: int = 5) -> KNNModel:
    if k < 1 or k > len(ds):
        raise RmtlesError(f"k={k} must lie in [1, {len(ds)}]")
    return KNNModel(ds.classes, ds.rows.copy(), ds.labels.copy(), int(k))
