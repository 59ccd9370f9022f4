"""Synthetic stand-ins for recordings: i.i.d. ensembles and covariance-structured classes.

Random streams
--------------
All generators use numpy's PCG64.  A single integer ``seed`` is expanded with
``SeedSequence``; per-window streams use ``spawn_key=(class, subject, window)``
so every window can be regenerated independently of the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotPSDError, RmtlesError
from .ingest import Recording, WindowMatrix
from .linalg import jacobi_eigh

ENTRY_LAWS = ("gaussian", "rademacher", "uniform")
# fourth cumulant E[x^4] - 3 of each standardized entry law
ENTRY_K4 = {"gaussian": 0.0, "rademacher": -2.0, "uniform": -1.2}


@dataclass(frozen=True)
class EnsembleSpec:
    entry_law: str
    n: int
    t: int
    seed: int = 0

    def __post_init__(self):
        if self.entry_law not in ENTRY_LAWS:
            raise RmtlesError(f"unknown entry law {self.entry_law!r}; choose from {ENTRY_LAWS}")
        if self.n < 1 or self.t < 1:
            raise RmtlesError("ensemble dimensions must be positive")


def draw_entries(rng: np.random.Generator, law: str, shape) -> np.ndarray:
    """Mean-0, variance-1 i.i.d. entries."""
    if law == "gaussian":
        return rng.standard_normal(shape)
    if law == "rademacher":
        return rng.integers(0, 2, size=shape).astype(float) * 2.0 - 1.0
    if law == "uniform":
        r = math.sqrt(3.0)
        return rng.uniform(-r, r, size=shape)
    raise RmtlesError(f"unknown entry law {law!r}")


def gen_ensemble(spec: EnsembleSpec, window_index: int = 0) -> WindowMatrix:
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed, spawn_key=(window_index,)))
    data = draw_entries(rng, spec.entry_law, (spec.n, spec.t))
    return WindowMatrix(data, window_index, f"{spec.entry_law}-{spec.seed}", spec.entry_law)


def gen_ensembles(spec: EnsembleSpec, count: int) -> list:
    """``count`` independent ensembles from per-window streams of ``spec.seed``."""
    return [gen_ensemble(spec, i) for i in range(count)]


@dataclass(frozen=True)
class ClassSpec:
    """Class-conditional covariance ``noise_floor * (R + sum_k (s_k - 1) v_k v_k^T)``.

    ``R`` is the equicorrelation matrix with off-diagonal ``correlation``; the
    spike directions ``v_k`` are orthonormal and drawn from ``direction_seed``.
    """

    label: str
    n_channels: int
    spike_strengths: tuple = ()
    correlation: float = 0.0
    noise_floor: float = 1.0
    direction_seed: int = 0

    def __post_init__(self):
        if self.n_channels < 2:
            raise RmtlesError("need at least 2 channels")
        if any(s < 1 for s in self.spike_strengths):
            raise RmtlesError("spike strengths must be >= 1")
        if len(self.spike_strengths) > self.n_channels:
            raise RmtlesError("more spikes than channels")
        if not self.noise_floor > 0:
            raise RmtlesError("noise_floor must be positive")
        object.__setattr__(self, "spike_strengths", tuple(float(s) for s in self.spike_strengths))

    def spike_directions(self) -> np.ndarray:
        k = len(self.spike_strengths)
        if k == 0:
            return np.zeros((self.n_channels, 0))
        rng = np.random.default_rng(self.direction_seed)
        q, r = np.linalg.qr(rng.standard_normal((self.n_channels, k)))
        return q * np.sign(np.diag(r))

    def base_covariance(self) -> np.ndarray:
        n, rho = self.n_channels, self.correlation
        cov = (1.0 - rho) * np.eye(n) + rho * np.ones((n, n))
        v = self.spike_directions()
        for j, s in enumerate(self.spike_strengths):
            cov += (s - 1.0) * np.outer(v[:, j], v[:, j])
        return self.noise_floor * cov


def covariance_sqrt(b) -> np.ndarray:
    """SPD square root via the Jacobi eigendecomposition."""
    w, v = jacobi_eigh(b)
    if w[0] <= 0:
        raise NotPSDError(f"covariance is not positive definite (smallest eigenvalue {w[0]:.3g})")
    return (v * np.sqrt(w)) @ v.T


def gen_recording(
    classes: Sequence[ClassSpec],
    windows_per_subject: int,
    delta_t: int,
    seed: int,
    *,
    subjects_per_class: int = 1,
    sample_rate_hz: float = 1000.0,
) -> list:
    """One recording per (class, subject), each ``windows_per_subject * delta_t`` samples long.

    Columns are ``B^{1/2} z`` with ``z`` standard normal, so classes differ only
    in covariance structure.
    """
    if not classes:
        raise RmtlesError("no classes given")
    n = classes[0].n_channels
    if any(c.n_channels != n for c in classes):
        raise RmtlesError("all classes must share the channel count")
    if windows_per_subject < 1 or delta_t < 2 or subjects_per_class < 1:
        raise RmtlesError("windows_per_subject, delta_t and subjects_per_class must be positive")
    names = [f"ch{i}" for i in range(n)]
    out = []
    for ci, cls in enumerate(classes):
        root = covariance_sqrt(cls.base_covariance())
        for si in range(subjects_per_class):
            blocks = []
            for wi in range(windows_per_subject):
                rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(ci, si, wi)))
                blocks.append(root @ rng.standard_normal((n, delta_t)))
            data = np.concatenate(blocks, axis=1)
            out.append(Recording(data, names, sample_rate_hz, cls.label, f"{cls.label}-{si:03d}"))
    return out
