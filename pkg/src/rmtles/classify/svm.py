"""RBF-kernel SVM trained by SMO, one-vs-one for more than two classes."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
import logging

import numpy as np

from ..errors import RmtlesError
from .dataset import Dataset, majority_label

log = logging.getLogger(__name__)

TAU = 1e-12


def rbf_kernel(x, y, gamma: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    sq = np.sum(x * x, axis=1)[:, None] + np.sum(y * y, axis=1)[None, :] - 2.0 * (x @ y.T)
    return np.exp(-gamma * np.clip(sq, 0.0, None))


def smo(K: np.ndarray, y: np.ndarray, C: float, tol: float = 1e-3, max_iter: int = 100_000):
    """Solve the SVM dual on a precomputed kernel.

    Working pairs are the maximal KKT violators; the two-variable subproblem is
    solved analytically and clipped to the box ``[0, C]``.  Returns
    ``(alpha, rho, converged)`` with decision function ``sum alpha_i y_i K(x_i, x) - rho``.
    """
    n = len(y)
    Q = (y[:, None] * y[None, :]) * K
    qd = np.diag(Q).copy()
    alpha = np.zeros(n)
    G = -np.ones(n)
    converged = False
    for _ in range(max_iter):
        yg = -y * G
        up = ((y > 0) & (alpha < C)) | ((y < 0) & (alpha > 0))
        low = ((y > 0) & (alpha > 0)) | ((y < 0) & (alpha < C))
        if not up.any() or not low.any():
            converged = True
            break
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        if yg[i] - yg[j] < tol:
            converged = True
            break
        ai, aj = alpha[i], alpha[j]
        if y[i] != y[j]:
            quad = max(qd[i] + qd[j] + 2.0 * Q[i, j], TAU)
            delta = (-G[i] - G[j]) / quad
            diff = ai - aj
            ni, nj = ai + delta, aj + delta
            if diff > 0:
                if nj < 0:
                    nj, ni = 0.0, diff
            elif ni < 0:
                ni, nj = 0.0, -diff
            if diff > 0:
                if ni > C:
                    ni, nj = C, C - diff
            elif nj > C:
                nj, ni = C, C + diff
        else:
            quad = max(qd[i] + qd[j] - 2.0 * Q[i, j], TAU)
            delta = (G[i] - G[j]) / quad
            total = ai + aj
            ni, nj = ai - delta, aj + delta
            if total > C:
                if ni > C:
                    ni, nj = C, total - C
            elif nj < 0:
                nj, ni = 0.0, total
            if total > C:
                if nj > C:
                    nj, ni = C, total - C
            elif ni < 0:
                ni, nj = 0.0, total
        G += Q[:, i] * (ni - ai) + Q[:, j] * (nj - aj)
        alpha[i], alpha[j] = ni, nj
    else:
        log.warning("SMO stopped at max_iter=%d before reaching tol=%g", max_iter, tol)

    yg = y * G
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(np.mean(yg[free]))
    else:
        at_upper = alpha >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = ~ub_mask
        ub = np.min(yg[ub_mask]) if ub_mask.any() else np.inf
        lb = np.max(yg[lb_mask]) if lb_mask.any() else -np.inf
        rho = float(0.5 * (ub + lb)) if np.isfinite(ub + lb) else float(ub if np.isfinite(ub) else lb)
    return alpha, rho, converged


@dataclass
class BinarySVM:
    positive: str
    negative: str
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i for support vectors
    rho: float
    alpha_sum_y: float = 0.0

    def decision(self, x, gamma: float) -> np.ndarray:
        if len(self.dual_coef) == 0:
            return np.full(len(x), -self.rho)
        return rbf_kernel(x, self.support_vectors, gamma) @ self.dual_coef - self.rho


@dataclass
class SVMModel:
    classes: tuple
    machines: list
    gamma: float
    C: float
    tol: float
    degenerate: bool = False
    fallback: str = ""

    kind = "svm"

    def decision_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.stack([m.decision(x, self.gamma) for m in self.machines], axis=1)

    def predict(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.degenerate:
            return np.full(len(x), self.fallback, dtype=object).astype(str)
        dec = self.decision_values(x)
        index = {c: i for i, c in enumerate(self.classes)}
        k = len(self.classes)
        votes = np.zeros((len(x), k))
        margin = np.zeros((len(x), k))
        for col, m in enumerate(self.machines):
            d = dec[:, col]
            pos, neg = index[m.positive], index[m.negative]
            votes[:, pos] += d > 0
            votes[:, neg] += d <= 0
            margin[:, pos] += d
            margin[:, neg] -= d
        # most votes; ties broken by larger summed margin, then class order
        best = np.lexsort((-np.arange(k)[None, :].repeat(len(x), 0), margin, votes), axis=1)[:, -1]
        return np.asarray(self.classes)[best]

    def to_params(self) -> dict:
        return {
            "classes": list(self.classes),
            "gamma": self.gamma,
            "C": self.C,
            "tol": self.tol,
            "degenerate": self.degenerate,
            "fallback": self.fallback,
            "machines": [
                {
                    "positive": m.positive,
                    "negative": m.negative,
                    "support_vectors": m.support_vectors.tolist(),
                    "dual_coef": m.dual_coef.tolist(),
                    "rho": m.rho,
                }
                for m in self.machines
            ],
        }

    @classmethod
    def from_params(cls, p) -> "SVMModel":
        machines = [
            BinarySVM(
                m["positive"],
                m["negative"],
                np.asarray(m["support_vectors"], dtype=float).reshape(len(m["dual_coef"]), -1),
                np.asarray(m["dual_coef"], dtype=float),
                float(m["rho"]),
            )
            for m in p["machines"]
        ]
        return cls(tuple(p["classes"]), machines, p["gamma"], p["C"], p["tol"], p["degenerate"], p["fallback"])


def _train_binary(x, labels, pos, neg, C, gamma, tol, max_iter) -> BinarySVM:
    y = np.where(labels == pos, 1.0, -1.0)
    alpha, rho, _ = smo(rbf_kernel(x, x, gamma), y, C, tol, max_iter)
    sv = alpha > 0
    return BinarySVM(pos, neg, x[sv].copy(), alpha[sv] * y[sv], rho, float(np.sum(alpha * y)))


def train_svm_rbf(ds: Dataset, C: float = 1.0, gamma: float = 1.0, tol: float = 1e-3, max_iter: int = 100_000) -> SVMModel:
    if C <= 0 or gamma <= 0:
        raise RmtlesError("C and gamma must be positive")
    classes = ds.classes
    if len(classes) < 2:
        raise RmtlesError("SVM training needs at least two classes")
    x = ds.rows
    if np.all(x == x[0]):
        # identical rows carry no information: predict the majority class
        return SVMModel(classes, [], gamma, C, tol, True, majority_label(ds.labels, classes))
    machines = []
    for pos, neg in combinations(classes, 2):
        mask = (ds.labels == pos) | (ds.labels == neg)
        machines.append(_train_binary(x[mask], ds.labels[mask], pos, neg, C, gamma, tol, max_iter))
    return SVMModel(classes, machines, gamma, C, tol)
