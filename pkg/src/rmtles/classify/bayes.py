from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import RmtlesError
from .dataset import Dataset

VAR_SMOOTHING = 1e-9


@dataclass
class GaussianNBModel:
    classes: tuple
    means: np.ndarray  # (classes, features)
    variances: np.ndarray
    log_prior: np.ndarray

    kind = "gnb"

    def log_posterior(self, x) -> np.ndarray:
        """Unnormalized log posterior, shape ``(rows, classes)``."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ll = -0.5 * np.sum(np.log(2.0 * np.pi * self.variances), axis=1)[None, :]
        ll = ll - 0.5 * np.sum((x[:, None, :] - self.means[None]) ** 2 / self.variances[None], axis=2)
        return ll + self.log_prior[None, :]

    def predict(self, x) -> np.ndarray:
        # argmax returns the first maximum, i.e. the lexicographically smallest class on ties
        return np.asarray(self.classes)[np.argmax(self.log_posterior(x), axis=1)]

    def to_params(self) -> dict:
        return {
            "classes": list(self.classes),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "log_prior": self.log_prior.tolist(),
        }

    @classmethod
    def from_params(cls, p) -> "GaussianNBModel":
        k = len(p["classes"])
        return cls(
            tuple(p["classes"]),
            np.asarray(p["means"], dtype=float).reshape(k, -1),
            np.asarray(p["variances"], dtype=float).reshape(k, -1),
            np.asarray(p["log_prior"], dtype=float),
        )


def train_gnb(ds: Dataset, var_smoothing: float = VAR_SMOOTHING) -> GaussianNBModel:
    classes = ds.classes
    if not classes:
        raise RmtlesError("empty dataset")
    eps = var_smoothing * float(np.max(np.var(ds.rows, axis=0)))
    if eps <= 0:
        eps = var_smoothing
    means, variances, counts = [], [], []
    for c in classes:
        rows = ds.rows[ds.labels == c]
        if len(rows) == 0:
            raise RmtlesError(f"class {c!r} has no rows")
        means.append(rows.mean(axis=0))
        variances.append(rows.var(axis=0) + eps)
        counts.append(len(rows))
    counts = np.asarray(counts, dtype=float)
    return GaussianNBModel(classes, np.array(means), np.array(variances), np.log(counts / counts.sum()))
