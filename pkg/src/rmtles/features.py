"""Per-channel statistical features and DFT-based band-pass preprocessing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RmtlesError
from .ingest import Recording, WindowMatrix

STAT_NAMES = ("harmonic_mean", "std_dev", "mean_deviation", "kurtosis", "rms", "peak", "range")


@dataclass(frozen=True)
class StatFeatureVector:
    """Seven statistics per channel, flattened channel-major (``7 * N`` values).

    ``flagged`` marks entries that are undefined for the data (harmonic mean of
    signed or zero-containing channels, kurtosis of constant channels); they
    hold ``nan`` and are dropped before classification.
    """

    values: np.ndarray
    flagged: np.ndarray
    names: tuple
    window_index: Optional[int] = None
    subject_id: Optional[str] = None
    label: Optional[str] = None


def _channel_stats(d: np.ndarray) -> np.ndarray:
    n = d.shape[1]
    mean = d.mean(axis=1, keepdims=True)
    dev = d - mean
    m2 = np.mean(dev**2, axis=1)
    m4 = np.mean(dev**4, axis=1)

    same_sign = np.all(d > 0, axis=1) | np.all(d < 0, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        hmean = np.where(same_sign, n / np.sum(1.0 / np.where(d == 0, 1.0, d), axis=1), np.nan)
        kurt = np.where(m2 > 0, m4 / np.where(m2 > 0, m2, 1.0) ** 2, np.nan)
    std = np.sqrt(np.sum(dev**2, axis=1) / (n - 1)) if n > 1 else np.zeros(d.shape[0])
    mdev = np.mean(np.abs(dev), axis=1)
    rms = np.sqrt(np.mean(d**2, axis=1))
    peak = d.max(axis=1)
    rng = peak - d.min(axis=1)
    return np.stack([hmean, std, mdev, kurt, rms, peak, rng], axis=1)


def stat_features(w: WindowMatrix) -> StatFeatureVector:
    d = np.asarray(w.data, dtype=float)
    if d.size == 0:
        raise RmtlesError("empty window")
    table = _channel_stats(d)
    channels = w.channel_names or tuple(f"ch{i}" for i in range(d.shape[0]))
    names = tuple(f"{ch}_{stat}" for ch in channels for stat in STAT_NAMES)
    values = table.reshape(-1)
    return StatFeatureVector(values, np.isnan(values), names, w.window_index, w.subject_id, w.label)


# -- discrete Fourier transform ---------------------------------------------


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def dft_direct(x) -> np.ndarray:
    """``X(k) = sum_n x(n) W_N^{kn}`` with ``W_N = exp(-2j pi / N)``, evaluated directly.

    Transforms along the last axis.  Exponents are reduced mod N before the
    complex exponential so large ``k n`` products do not lose phase accuracy.
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    k = np.arange(n)
    w = np.exp(-2j * np.pi * (np.outer(k, k) % n) / n)
    return x @ w.T


def _fft_pow2(x: np.ndarray) -> np.ndarray:
    # iterative radix-2 decimation in time along the last axis
    n = x.shape[-1]
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    a = x[..., rev].astype(complex)
    size = 2
    while size <= n:
        half = size // 2
        tw = np.exp(-2j * np.pi * np.arange(half) / size)
        a = a.reshape(a.shape[:-1] + (n // size, size))
        even = a[..., :half]
        odd = a[..., half:] * tw
        a = np.concatenate([even + odd, even - odd], axis=-1).reshape(a.shape[:-2] + (n,))
        size *= 2
    return a


def _fft_bluestein(x: np.ndarray) -> np.ndarray:
    # chirp-z: arbitrary-length DFT as a power-of-two circular convolution
    n = x.shape[-1]
    k = np.arange(n)
    chirp = np.exp(-1j * np.pi * ((k * k) % (2 * n)) / n)
    m = 1 << (2 * n - 1).bit_length()
    a = np.zeros(x.shape[:-1] + (m,), dtype=complex)
    a[..., :n] = x * chirp
    b = np.zeros(m, dtype=complex)
    b[:n] = np.conj(chirp)
    b[m - n + 1:] = np.conj(chirp[1:][::-1])
    conv = _ifft_pow2(_fft_pow2(a) * _fft_pow2(b))
    return conv[..., :n] * chirp


def _ifft_pow2(x: np.ndarray) -> np.ndarray:
    return np.conj(_fft_pow2(np.conj(x))) / x.shape[-1]


def dft(x, method: str = "auto") -> np.ndarray:
    """Forward DFT along the last axis.

    ``method`` is ``"direct"`` (O(N^2) reference), ``"fast"`` (radix-2 for
    power-of-two lengths, Bluestein otherwise) or ``"auto"``.
    """
    x = np.asarray(x, dtype=complex)
    n = x.shape[-1]
    if n < 1:
        raise RmtlesError("DFT of an empty sequence")
    if method == "direct" or (method == "auto" and n <= 32 and not _is_pow2(n)):
        return dft_direct(x)
    if method not in ("auto", "fast"):
        raise RmtlesError(f"unknown DFT method {method!r}")
    return _fft_pow2(x) if _is_pow2(n) else _fft_bluestein(x)


def idft(X, method: str = "auto") -> np.ndarray:
    """Inverse DFT: ``x(n) = (1/N) sum_k X(k) W_N^{-kn}``."""
    X = np.asarray(X, dtype=complex)
    return np.conj(dft(np.conj(X), method)) / X.shape[-1]


def bin_frequencies(n: int, sample_rate_hz: float) -> np.ndarray:
    """Signed frequency (Hz) of each DFT bin; an even-length Nyquist bin is ``+fs/2``."""
    k = np.arange(n)
    return np.where(k <= n // 2, k, k - n) * (sample_rate_hz / n)


def bandpass_mask(rec: Recording, lo_hz: float, hi_hz: float) -> Recording:
    """Zero every DFT bin whose absolute frequency lies outside ``[lo_hz, hi_hz]``.

    The mask is symmetric in +/- frequency so the inverse transform is real
    up to rounding; the residual imaginary part is checked and dropped.
    """
    nyq = rec.sample_rate_hz / 2.0
    if not (0.0 <= lo_hz < hi_hz <= nyq):
        raise RmtlesError(f"invalid band [{lo_hz}, {hi_hz}] for sample rate {rec.sample_rate_hz}")
    f = np.abs(bin_frequencies(rec.n_samples, rec.sample_rate_hz))
    keep = (f >= lo_hz) & (f <= hi_hz)
    out = np.empty_like(rec.data)
    # one channel at a time: Bluestein padding makes whole-recording transforms large
    for ch, row in enumerate(rec.data):
        filtered = idft(dft(row) * keep)
        scale = max(float(np.max(np.abs(row))), 1.0)
        resid = float(np.max(np.abs(filtered.imag)))
        if resid > 1e-9 * scale:
            raise RmtlesError(f"band-pass output of channel {ch} not real (imaginary residue {resid:.3g})")
        out[ch] = filtered.real
    return rec.with_data(out)


def energy(x) -> float:
    x = np.asarray(x)
    return float(np.sum(np.abs(x) ** 2))


def parseval_gap(x) -> float:
    """Relative difference between time-domain and (1/N) frequency-domain energy."""
    x = np.asarray(x, dtype=complex)
    e_t = energy(x)
    e_f = energy(dft(x)) / x.shape[-1]
    return abs(e_t - e_f) / max(e_t, math.ulp(1.0))
