"""Marchenko-Pastur law, linear eigenvalue statistics (LES) and entropies.

Integrals against the M-P density use the substitution

    lambda = a_m + 2 sqrt(c) sin(theta),   a_m = 1 + c,

which maps the support ``[a, b]`` onto ``theta in [-pi/2, pi/2]`` and turns
``rho(lambda) d lambda`` into the smooth weight ``2 cos^2(theta) / (pi lambda)``.
The square-root edge singularities disappear, so plain Gauss-Legendre rules
converge spectrally.  Internally the angle is shifted to ``u = theta + pi/2``
in ``[0, pi]`` and ``lambda = a + 4 sqrt(c) sin^2(u/2)``, which avoids the
cancellation in ``1 + sin(theta)`` at the lower edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import QuadratureError, RmtlesError
from .linalg import CovarianceMatrix, EigenSpectrum, eigvals_sym, trace_normalize
from .quadrature import gauss_legendre, integrate

LOG_FLOOR = 1e-12


@dataclass(frozen=True)
class MPLaw:
    """Marchenko-Pastur law with aspect ratio ``c = N / delta_t``."""

    c: float

    def __post_init__(self):
        if not 0.0 < self.c <= 1.0:
            raise RmtlesError(f"M-P law needs 0 < c <= 1, got c={self.c}")

    @property
    def a(self) -> float:
        return (1.0 - math.sqrt(self.c)) ** 2

    @property
    def b(self) -> float:
        return (1.0 + math.sqrt(self.c)) ** 2

    @property
    def center(self) -> float:
        return 1.0 + self.c

    @property
    def half_width(self) -> float:
        return 2.0 * math.sqrt(self.c)

    def lam(self, u):
        """Eigenvalue at shifted angle ``u = theta + pi/2``."""
        return self.a + 2.0 * self.half_width * np.sin(0.5 * u) ** 2

    def weight(self, u):
        """``rho(lambda(u)) * dlambda/du``."""
        return 2.0 * np.sin(u) ** 2 / (math.pi * self.lam(u))

    def angle(self, lam):
        """Inverse of :meth:`lam` on the support."""
        r = np.clip((np.asarray(lam, dtype=float) - self.a) / (2.0 * self.half_width), 0.0, 1.0)
        return 2.0 * np.arcsin(np.sqrt(r))


def mp_density(law: MPLaw, lam):
    lam = np.asarray(lam, dtype=float)
    inside = (lam > law.a) & (lam < law.b)
    safe = np.where(inside, lam, 1.0)
    val = np.sqrt(np.clip((law.b - safe) * (safe - law.a), 0.0, None)) / (2.0 * math.pi * law.c * safe)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def mp_cdf(law: MPLaw, lam):
    """Distribution function of the M-P law by quadrature in theta."""
    lam = np.asarray(lam, dtype=float)
    flat = lam.reshape(-1)
    out = np.where(flat >= law.b, 1.0, 0.0)
    inside = (flat > law.a) & (flat < law.b)
    if np.any(inside):
        top = law.angle(flat[inside])
        out[inside] = np.clip(integrate(law.weight, 0.0, top, n_max=2048, rtol=1e-12), 0.0, 1.0)
    out = out.reshape(lam.shape)
    return float(out) if out.ndim == 0 else out


def mp_ppf(law: MPLaw, u, iters: int = 60):
    """Inverse of :func:`mp_cdf` by vectorized bisection."""
    u = np.asarray(u, dtype=float)
    lo = np.full(u.shape, law.a)
    hi = np.full(u.shape, law.b)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = mp_cdf(law, mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def esd_ks_distance(spec: EigenSpectrum, law: MPLaw, c_tol: float = 1e-9) -> float:
    """Kolmogorov-Smirnov distance between the empirical spectral distribution and M-P."""
    if spec.trace_normalized:
        raise RmtlesError("KS against M-P needs the per-sample spectrum, not a trace-normalized one")
    if not abs(spec.c - law.c) <= c_tol:
        raise RmtlesError(f"spectrum has c={spec.c}, law has c={law.c}")
    x = np.sort(np.asarray(spec.eigenvalues, dtype=float))
    n = len(x)
    f = mp_cdf(law, x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def count_outliers(spec: EigenSpectrum, law: MPLaw):
    """Eigenvalues below the lower and above the upper M-P edge."""
    x = np.asarray(spec.eigenvalues)
    return int(np.sum(x < law.a)), int(np.sum(x > law.b))


# -- test functions ---------------------------------------------------------


def _xlogx(x):
    pos = x > 0
    return np.where(pos, x * np.log(np.where(pos, x, 1.0)), 0.0)


@dataclass(frozen=True)
class TestFunction:
    """Scalar function applied to each eigenvalue, with its derivative."""

    __test__ = False  # not a pytest class

    name: str
    func: Callable
    deriv: Callable
    needs_trace_normalized: bool = False
    log_at_zero: bool = False

    def __call__(self, x):
        return self.func(np.asarray(x, dtype=float))


LRT = TestFunction("lrt", lambda x: x - np.log(x) - 1.0, lambda x: 1.0 - 1.0 / x, log_at_zero=True)
WASSERSTEIN = TestFunction(
    "wasserstein", lambda x: x - 2.0 * np.sqrt(x) + 1.0, lambda x: 1.0 - 1.0 / np.sqrt(x)
)
NAGAO = TestFunction("nagao", lambda x: (x - 1.0) ** 2, lambda x: 2.0 * (x - 1.0))
VN_ENTROPY = TestFunction(
    "vnentropy", lambda x: -_xlogx(x), lambda x: -np.log(x) - 1.0, needs_trace_normalized=True
)
IDENTITY = TestFunction("identity", lambda x: x, np.ones_like)
CONSTANT = TestFunction("constant", np.ones_like, np.zeros_like)

TEST_FUNCTIONS = {f.name: f for f in (LRT, WASSERSTEIN, NAGAO, VN_ENTROPY, IDENTITY, CONSTANT)}
STANDARD_TEST_FUNCTIONS = ("lrt", "wasserstein", "nagao", "vnentropy")


def tabulated(xs, ys, name: str = "tabulated") -> TestFunction:
    """Test function from samples, interpolated by a cubic spline."""
    from scipy.interpolate import CubicSpline

    spline = CubicSpline(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
    return TestFunction(name, spline, spline.derivative())


def get_test_function(name) -> TestFunction:
    if isinstance(name, TestFunction):
        return name
    try:
        return TEST_FUNCTIONS[name]
    except KeyError:
        raise RmtlesError(f"unknown test function {name!r}; choose from {sorted(TEST_FUNCTIONS)}") from None


# -- linear eigenvalue statistics -------------------------------------------


@dataclass(frozen=True)
class LESFeature:
    value: float
    test_function: str
    n: int
    normalized_by_n: bool = False
    floored: int = 0
    window_index: Optional[int] = None
    subject_id: Optional[str] = None
    label: Optional[str] = None


def les(
    spec: EigenSpectrum,
    phi,
    normalized_by_n: bool = False,
    *,
    window_index=None,
    subject_id=None,
    label=None,
) -> LESFeature:
    """``sum_j phi(lambda_j)``, divided by ``n`` when ``normalized_by_n``.

    For log-type functions (LRT), eigenvalues in ``(0, 1e-12)`` are floored to
    ``1e-12`` and counted in ``floored``; an exact zero is an error.  The
    entropy function needs a trace-normalized spectrum and uses ``0 log 0 = 0``.
    """
    phi = get_test_function(phi)
    lam = np.asarray(spec.eigenvalues, dtype=float)
    if lam.size and lam.min() < 0:
        raise RmtlesError("LES needs a nonnegative spectrum")
    if phi.needs_trace_normalized and not spec.trace_normalized:
        raise RmtlesError(f"{phi.name} needs a trace-normalized spectrum")
    floored = 0
    if phi.log_at_zero:
        if np.any(lam == 0.0):
            raise RmtlesError(f"{phi.name} is undefined on a spectrum with an exact zero eigenvalue")
        small = lam < LOG_FLOOR
        floored = int(np.sum(small))
        lam = np.where(small, LOG_FLOOR, lam)
    value = float(np.sum(phi(lam)))
    if normalized_by_n:
        value /= spec.n
    if not math.isfinite(value):
        raise RmtlesError(f"non-finite LES for {phi.name}")
    return LESFeature(value, phi.name, spec.n, normalized_by_n, floored, window_index, subject_id, label)


def les_lln_limit(phi, law: MPLaw) -> float:
    """``integral phi(lambda) rho_c(lambda) d lambda``: the limit of ``LES / n``."""
    phi = get_test_function(phi)
    if law.a == 0.0 and phi.log_at_zero:
        raise RmtlesError(f"{phi.name} is unbounded near 0 and the support reaches 0 at c=1")
    return float(integrate(lambda u: phi(law.lam(u)) * law.weight(u), 0.0, math.pi, rtol=1e-12))


def vn_entropy_limit(law: MPLaw, n: int) -> float:
    """Large-n prediction of the entropy of a trace-normalized M-P spectrum.

    With ``p_j = lambda_j / n`` (trace ``n``), ``-sum p log p = log n + n^-1 sum(-lambda log lambda)``.
    """
    return math.log(n) + les_lln_limit(VN_ENTROPY, law)


# -- CLT variance -----------------------------------------------------------


@dataclass(frozen=True)
class CLTVarianceParams:
    c: float
    k4: float = 0.0
    quadrature_points: int = 128

    def __post_init__(self):
        if not 0.0 < self.c <= 1.0:
            raise RmtlesError(f"c must lie in (0, 1], got {self.c}")
        if self.quadrature_points < 32:
            raise RmtlesError("quadrature_points must be >= 32")


def _clt_variance_rule(phi: TestFunction, c: float, k4: float, n: int) -> float:
    law = MPLaw(c)
    u, w = gauss_legendre(n, 0.0, math.pi)
    s = -np.cos(u)  # sin(theta)
    lam = law.lam(u)
    f = phi(lam)
    d = phi.deriv(lam)
    dl = lam[:, None] - lam[None, :]
    df = f[:, None] - f[None, :]
    close = np.abs(dl) <= 1e-7 * law.b
    quot = np.where(close, 0.5 * (d[:, None] + d[None, :]), df / np.where(close, 1.0, dl))
    # dlambda and the square roots cancel: integrand (dphi/dlambda)^2 * 4c (1 - s1 s2)
    v_main = 4.0 * c / (2.0 * math.pi**2) * np.einsum("i,j,ij->", w, w, quot**2 * (1.0 - s[:, None] * s[None, :]))
    k4_int = np.sum(w * f * law.half_width * s)
    v_k4 = k4 / (4.0 * c * math.pi**2) * k4_int**2
    return float(v_main + v_k4)


def clt_variance(phi, params: CLTVarianceParams, *, rtol: float = 1e-6, max_points: int = 2048) -> float:
    """Limiting variance of the centered, un-normalized LES.

    Tensor Gauss-Legendre in theta starting at ``params.quadrature_points`` and
    doubling until the relative change is below ``rtol``.
    """
    phi = get_test_function(phi)
    n = params.quadrature_points
    prev = _clt_variance_rule(phi, params.c, params.k4, n)
    while n < max_points:
        n *= 2
        cur = _clt_variance_rule(phi, params.c, params.k4, n)
        if abs(cur - prev) <= max(rtol * abs(cur), 1e-14):
            return max(cur, 0.0)
        prev = cur
    raise QuadratureError(f"CLT variance for {phi.name} not converged at {max_points} points")


def centered(values):
    """Subtract the across-window mean (the empirical centering of the LES)."""
    v = np.asarray(values, dtype=float)
    return v - v.mean()


# -- entropies --------------------------------------------------------------


def shannon_entropy(p, base: Optional[float] = None) -> float:
    p = np.asarray(p, dtype=float)
    if np.any(p < 0):
        raise RmtlesError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise RmtlesError(f"probabilities sum to {p.sum()!r}, not 1")
    h = -float(np.sum(_xlogx(p)))
    if base is not None:
        h /= math.log(base)
    return h


def von_neumann_entropy(m) -> float:
    """``-Tr(rho log rho)`` of the trace-normalized PSD matrix ``m``."""
    if not isinstance(m, CovarianceMatrix):
        m = np.asarray(m, dtype=float)
    spec = trace_normalize(eigvals_sym(m))
    return les(spec, VN_ENTROPY).value
