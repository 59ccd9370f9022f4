from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import RmtlesError


@dataclass(frozen=True)
class Dataset:
    """Labeled feature rows; ``group_key`` optionally ties rows to a subject."""

    rows: np.ndarray
    labels: np.ndarray
    group_key: Optional[np.ndarray] = None
    feature_names: tuple = ()

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim == 1:
            rows = rows[:, None]
        if rows.ndim != 2:
            raise RmtlesError(f"feature rows must be 2-D, got shape {rows.shape}")
        labels = np.asarray(self.labels).astype(str)
        if labels.shape != (rows.shape[0],):
            raise RmtlesError(f"{len(labels)} labels for {rows.shape[0]} rows")
        if not np.all(np.isfinite(rows)):
            bad = np.argwhere(~np.isfinite(rows))[0]
            raise RmtlesError(f"non-finite feature at row {bad[0]}, column {bad[1]}")
        groups = self.group_key
        if groups is not None:
            groups = np.asarray(groups).astype(str)
            if groups.shape != labels.shape:
                raise RmtlesError("group_key must have one entry per row")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "group_key", groups)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))

    def __len__(self):
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]

    @property
    def classes(self) -> tuple:
        return tuple(np.unique(self.labels).tolist())

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        groups = None if self.group_key is None else self.group_key[idx]
        return Dataset(self.rows[idx], self.labels[idx], groups, self.feature_names)

    def with_rows(self, rows) -> "Dataset":
        return Dataset(rows, self.labels, self.group_key, self.feature_names)


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, rows) -> "Standardizer":
        rows = np.asarray(rows, dtype=float)
        mean = rows.mean(axis=0)
        sd = rows.std(axis=0)
        return cls(mean, np.where(sd > 0, sd, 1.0))

    def transform(self, rows):
        return (np.asarray(rows, dtype=float) - self.mean) / self.scale

    def to_params(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_params(cls, p) -> "Standardizer":
        return cls(np.asarray(p["mean"], dtype=float), np.asarray(p["scale"], dtype=float))


def majority_label(labels, classes=None):
    """Most frequent label; ties go to the lexicographically smallest."""
    labels = np.asarray(labels).astype(str)
    classes = tuple(np.unique(labels).tolist()) if classes is None else tuple(classes)
    counts = [int(np.sum(labels == c)) for c in classes]
    return classes[int(np.argmax(counts))]
