"""Window standardization, sample covariance and a cyclic Jacobi eigensolver."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numba
import numpy as np

from .errors import NotPSDError, NotSymmetricError, RmtlesError, ZeroVarianceChannel
from .ingest import WindowMatrix

PER_SAMPLE = "per-sample"
DIVIDE_BY_N = "paper-literal"
NORMALIZATIONS = (PER_SAMPLE, DIVIDE_BY_N)

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
SYMMETRY_TOL = 1e-12
PSD_CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class CovarianceMatrix:
    data: np.ndarray
    delta_t: int
    normalization: str = PER_SAMPLE

    @property
    def n(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class EigenSpectrum:
    """Ascending eigenvalues of a window covariance.

    ``c`` is the aspect ratio ``N / delta_t`` of the window the covariance came
    from (``nan`` when unknown).
    """

    eigenvalues: np.ndarray
    n: int
    c: float
    trace_normalized: bool = False
    normalization: str = PER_SAMPLE

    def __len__(self):
        return self.n


def standardize(w: WindowMatrix) -> WindowMatrix:
    """Shift/scale each row to sample mean 0 and unbiased variance 1."""
    x = np.asarray(w.data, dtype=np.float64)
    if x.shape[1] < 2:
        raise RmtlesError("standardization needs at least 2 samples per row")
    centered = x - x.mean(axis=1, keepdims=True)
    sd = np.sqrt(np.sum(centered * centered, axis=1) / (x.shape[1] - 1))
    scale = np.max(np.abs(x), axis=1)
    dead = np.flatnonzero(sd <= 1e-12 * np.maximum(scale, np.finfo(float).tiny))
    if len(dead):
        ch = int(dead[0])
        name = w.channel_names[ch] if ch < len(w.channel_names) else None
        raise ZeroVarianceChannel(ch, name)
    return w.replace_data(centered / sd[:, None])


def sample_covariance(w: Union[WindowMatrix, np.ndarray], normalization: str = PER_SAMPLE) -> CovarianceMatrix:
    """``W W^T`` scaled by ``1/delta_t`` (per-sample) or ``1/N`` (paper-literal).

    The window is expected to be standardized already; it is not checked so
    that raw ensembles can be fed in directly.
    """
    x = np.asarray(w.data if isinstance(w, WindowMatrix) else w, dtype=np.float64)
    n, t = x.shape
    if normalization == PER_SAMPLE:
        denom = t
    elif normalization == DIVIDE_BY_N:
        denom = n
    else:
        raise RmtlesError(f"unknown normalization {normalization!r}")
    m = x @ x.T
    m = 0.5 * (m + m.T) / denom
    return CovarianceMatrix(m, t, normalization)


@numba.njit(cache=True, nogil=True)
def _jacobi_kernel(a, tol, max_sweeps):
    n = a.shape[0]
    v = np.eye(n)
    norm = np.sqrt(np.sum(a * a))
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if np.sqrt(off) <= tol * norm:
            return v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return v, -1


def jacobi_eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Iterates full sweeps until the off-diagonal Frobenius norm drops below
    ``tol * ||A||_F``.  Returns ``(eigenvalues, eigenvectors)`` with eigenvalues
    ascending and eigenvectors as columns.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise RmtlesError(f"expected a square matrix, got shape {a.shape}")
    check_symmetric(a)
    v, sweeps = _jacobi_kernel(a, tol, max_sweeps)
    if sweeps < 0:
        raise RmtlesError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def check_symmetric(a, tol: float = SYMMETRY_TOL):
    scale = np.max(np.abs(a)) if a.size else 0.0
    asym = np.max(np.abs(a - a.T)) if a.size else 0.0
    if asym > tol * max(scale, np.finfo(float).tiny):
        raise NotSymmetricError(f"matrix not symmetric: max |A - A^T| = {asym:.3g}")


def eig_sym(m: Union[CovarianceMatrix, np.ndarray], c: Optional[float] = None):
    """Spectrum and eigenvectors of a covariance matrix.

    Negative eigenvalues down to ``-1e-10 * trace`` are rounding noise and are
    clamped to zero; anything more negative means the input was not a
    covariance and raises :class:`NotPSDError`.
    """
    if isinstance(m, CovarianceMatrix):
        data, norm = m.data, m.normalization
        if c is None:
            c = m.n / m.delta_t
    else:
        data, norm = np.asarray(m, dtype=np.float64), PER_SAMPLE
    w, v = jacobi_eigh(data)
    trace = float(np.trace(data))
    floor = -PSD_CLAMP_TOL * max(abs(trace), np.finfo(float).tiny)
    if w.size and w[0] < floor:
        raise NotPSDError(f"eigenvalue {w[0]:.3g} below clamp tolerance {floor:.3g}")
    w = np.where(w < 0.0, 0.0, w)
    spec = EigenSpectrum(w, len(w), float("nan") if c is None else float(c), False, norm)
    return spec, v


def eigvals_sym(m, c: Optional[float] = None) -> EigenSpectrum:
    return eig_sym(m, c)[0]


def trace_normalize(s: EigenSpectrum) -> EigenSpectrum:
    total = float(np.sum(s.eigenvalues))
    if not total > 0:
        raise RmtlesError("cannot trace-normalize a spectrum with zero trace")
    return EigenSpectrum(s.eigenvalues / total, s.n, s.c, True, s.normalization)


def window_spectrum(w: WindowMatrix, normalization: str = PER_SAMPLE, standardized: bool = True) -> EigenSpectrum:
    """Standardize (optionally), form the sample covariance and diagonalize."""
    if standardized:
        w = standardize(w)
    return eigvals_sym(sample_covariance(w, normalization), c=w.n / w.delta_t)


def sqrtm_psd(b) -> np.ndarray:
    """Symmetric square root through the Jacobi decomposition, clamping tiny negatives."""
    w, v = jacobi_eigh(b)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
