"""One-way ANOVA with F-distribution p-values from a continued-fraction incomplete beta."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import RmtlesError

_FPMIN = 1e-300
_EPS = 1e-16
_MAXIT = 10_000

SIGNIFICANCE = 0.05


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _MAXIT + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise RmtlesError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float, xc: float = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``.

    The continued fraction converges fast for ``x < (a+1)/(a+b+2)``; above
    that the symmetry ``I_x(a,b) = 1 - I_{1-x}(b,a)`` is used.  Callers that
    know ``1 - x`` more accurately than the subtraction pass it as ``xc``.
    """
    if a <= 0 or b <= 0:
        raise RmtlesError("incomplete beta needs a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise RmtlesError(f"incomplete beta argument {x!r} outside [0, 1]")
    if xc is None:
        xc = 1.0 - x
    if x == 0.0:
        return 0.0
    if xc <= 0.0:
        return 1.0
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(xc)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, xc) / b


def _f_args(x: float, df1: int, df2: int):
    if df1 < 1 or df2 < 1:
        raise RmtlesError("degrees of freedom must be >= 1")
    denom = df1 * x + df2
    return df1 * x / denom, df2 / denom


def f_cdf(x: float, df1: int, df2: int) -> float:
    if x <= 0:
        _f_args(0.0, df1, df2)
        return 0.0
    if math.isinf(x):
        return 1.0
    u, uc = _f_args(x, df1, df2)
    return betainc_reg(df1 / 2.0, df2 / 2.0, u, uc)


def f_sf(x: float, df1: int, df2: int) -> float:
    """Upper tail ``1 - f_cdf``, evaluated directly so tiny p-values keep precision."""
    if x <= 0:
        _f_args(0.0, df1, df2)
        return 1.0
    if math.isinf(x):
        return 0.0
    u, uc = _f_args(x, df1, df2)
    return betainc_reg(df2 / 2.0, df1 / 2.0, uc, u)


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    df_between: int
    df_within: int
    p_value: float
    group_means: tuple
    degenerate: bool = False

    @property
    def significant(self) -> bool:
        return self.p_value < SIGNIFICANCE


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classical between/within sum-of-squares F test.

    Zero within-group variance is flagged ``degenerate``: with a nonzero
    between-group spread the result is ``F = inf, p = 0``; with none at all it
    is ``F = 0, p = 1``.
    """
    arrays = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(arrays) < 2:
        raise RmtlesError("ANOVA needs at least 2 groups")
    for i, g in enumerate(arrays):
        if len(g) < 2:
            raise RmtlesError(f"group {i} has {len(g)} samples; need at least 2")
        if not np.all(np.isfinite(g)):
            raise RmtlesError(f"group {i} contains non-finite values")
    k = len(arrays)
    n_total = sum(len(g) for g in arrays)
    means = [float(g.mean()) for g in arrays]
    grand = float(np.concatenate(arrays).mean())
    ssb = sum(len(g) * (m - grand) ** 2 for g, m in zip(arrays, means))
    ssw = sum(float(np.sum((g - m) ** 2)) for g, m in zip(arrays, means))
    df_b, df_w = k - 1, n_total - k
    scale = max(float(np.max(np.abs(np.concatenate(arrays) - grand))), _FPMIN)
    if ssw <= (1e-14 * scale) ** 2 * n_total:
        if ssb <= (1e-14 * scale) ** 2 * n_total:
            return AnovaResult(0.0, df_b, df_w, 1.0, tuple(means), True)
        return AnovaResult(math.inf, df_b, df_w, 0.0, tuple(means), True)
    f = (ssb / df_b) / (ssw / df_w)
    return AnovaResult(float(f), df_b, df_w, f_sf(f, df_b, df_w), tuple(means))


@dataclass(frozen=True)
class AnovaTable:
    """Pooled test over all groups plus every pairwise test."""

    labels: tuple
    pooled: AnovaResult
    pairs: dict = field(default_factory=dict)


def anova_all_pairs(groups: dict) -> AnovaTable:
    labels = tuple(sorted(groups))
    pooled = anova_oneway([groups[g] for g in labels])
    pairs = {(a, b): anova_oneway([groups[a], groups[b]]) for a, b in combinations(labels, 2)}
    return AnovaTable(labels, pooled, pairs)
