import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from rmtles.errors import RmtlesError
from rmtles.linalg import EigenSpectrum, trace_normalize, window_spectrum
from rmtles.rmt import (
    CONSTANT,
    IDENTITY,
    LRT,
    NAGAO,
    VN_ENTROPY,
    WASSERSTEIN,
    CLTVarianceParams,
    MPLaw,
    centered,
    clt_variance,
    count_outliers,
    esd_ks_distance,
    get_test_function,
    les,
    les_lln_limit,
    mp_cdf,
    mp_density,
    mp_ppf,
    shannon_entropy,
    tabulated,
    vn_entropy_limit,
    von_neumann_entropy,
)
from rmtles.synth import ENTRY_K4, EnsembleSpec, gen_ensemble

CS = [0.05, 0.25, 0.5, 0.8, 0.99]


def _quad_moment(law, f):
    val, _ = sp_integrate.quad(lambda x: f(x) * mp_density(law, x), law.a, law.b, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def test_edges():
    law = MPLaw(0.25)
    assert (law.a, law.b) == pytest.approx((0.25, 2.25))
    assert law.center == pytest.approx(1.25)
    with pytest.raises(RmtlesError):
        MPLaw(0.0)
    with pytest.raises(RmtlesError):
        MPLaw(1.5)


@pytest.mark.parametrize("c", CS)
def test_density_moments_against_quad(c):
    law = MPLaw(c)
    assert _quad_moment(law, lambda x: 1.0) == pytest.approx(1.0, abs=1e-9)
    assert _quad_moment(law, lambda x: x) == pytest.approx(1.0, abs=1e-9)
    assert _quad_moment(law, lambda x: x * x) == pytest.approx(1.0 + c, abs=1e-9)


def test_density_outside_support_is_zero():
    law = MPLaw(0.3)
    np.testing.assert_array_equal(mp_density(law, np.array([0.0, law.a * 0.99, law.b * 1.01, 10.0])), 0.0)


@pytest.mark.parametrize("c", CS)
def test_cdf_against_quad(c):
    law = MPLaw(c)
    for x in np.linspace(law.a, law.b, 9)[1:-1]:
        ref, _ = sp_integrate.quad(lambda y: mp_density(law, y), law.a, x, epsabs=1e-13, epsrel=1e-12, limit=200)
        assert mp_cdf(law, x) == pytest.approx(ref, abs=1e-9)
    assert mp_cdf(law, law.a * 0.5) == 0.0
    assert mp_cdf(law, law.b * 2) == 1.0


def test_cdf_at_c_one():
    law = MPLaw(1.0)
    assert mp_cdf(law, law.b) == pytest.approx(1.0, abs=1e-12)
    # quarter-circle-like closed form of the c = 1 law at lambda = 1
    assert mp_cdf(law, 1.0) == pytest.approx(0.5 + (math.sqrt(3) / 2 - math.pi / 6) / math.pi, abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(c=st.floats(0.02, 1.0), u=st.floats(0.001, 0.999))
def test_ppf_inverts_cdf(c, u):
    law = MPLaw(c)
    assert mp_cdf(law, mp_ppf(law, u)) == pytest.approx(u, abs=1e-9)


def test_ks_of_quantile_spectrum():
    law = MPLaw(0.25)
    n = 50
    lam = np.array([mp_ppf(law, (i - 0.5) / n) for i in range(1, n + 1)])
    spec = EigenSpectrum(lam, n, 0.25)
    assert esd_ks_distance(spec, law) == pytest.approx(0.5 / n, abs=1e-9)


def test_ks_guards():
    law = MPLaw(0.25)
    spec = EigenSpectrum(np.ones(4), 4, 0.5)
    with pytest.raises(RmtlesError):
        esd_ks_distance(spec, law)
    with pytest.raises(RmtlesError):
        esd_ks_distance(trace_normalize(EigenSpectrum(np.ones(4), 4, 0.25)), law)


def test_count_outliers():
    law = MPLaw(0.25)
    spec = EigenSpectrum(np.array([0.1, 0.5, 1.0, 2.0, 3.0, 9.0]), 6, 0.25)
    assert count_outliers(spec, law) == (1, 2)


# -- LLN limits --------------------------------------------------------------


@pytest.mark.parametrize("c", CS)
def test_lln_limits_closed_form(c):
    law = MPLaw(c)
    assert les_lln_limit(IDENTITY, law) == pytest.approx(1.0, abs=1e-12)
    assert les_lln_limit(CONSTANT, law) == pytest.approx(1.0, abs=1e-12)
    assert les_lln_limit(NAGAO, law) == pytest.approx(c, abs=1e-12)
    # E log(lambda) = -1 - (1 - c)/c log(1 - c)
    assert les_lln_limit(LRT, law) == pytest.approx(1.0 + (1.0 - c) / c * math.log1p(-c), abs=1e-10)


@pytest.mark.parametrize("c", CS)
@pytest.mark.parametrize("phi", [WASSERSTEIN, VN_ENTROPY], ids=lambda p: p.name)
def test_lln_limits_against_quad(c, phi):
    law = MPLaw(c)
    assert les_lln_limit(phi, law) == pytest.approx(_quad_moment(law, phi.func), abs=1e-9)


def test_lln_log_singular_at_c_one():
    with pytest.raises(RmtlesError):
        les_lln_limit(LRT, MPLaw(1.0))
    assert les_lln_limit(NAGAO, MPLaw(1.0)) == pytest.approx(1.0)


def test_vn_entropy_limit():
    law = MPLaw(0.25)
    assert vn_entropy_limit(law, 64) == pytest.approx(math.log(64) + les_lln_limit(VN_ENTROPY, law))


# -- CLT variance ------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(c=st.floats(0.02, 1.0), k4=st.floats(-2.0, 3.0))
def test_clt_closed_forms(c, k4):
    # identity: 2c + k4 c; Nagao: 8c^3 + 4c^2 + 4 k4 c^3
    assert clt_variance(IDENTITY, CLTVarianceParams(c, k4)) == pytest.approx(2 * c + k4 * c, abs=1e-9)
    assert clt_variance(NAGAO, CLTVarianceParams(c, k4)) == pytest.approx(8 * c**3 + 4 * c**2 + 4 * k4 * c**3, abs=1e-8)
    assert clt_variance(CONSTANT, CLTVarianceParams(c, k4)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("k4,expected", [(0.0, 0.375), (-2.0, 0.25), (-1.2, 0.30)])
def test_clt_nagao_frozen(k4, expected):
    assert clt_variance(NAGAO, CLTVarianceParams(0.25, k4)) == pytest.approx(expected, abs=1e-9)


def test_clt_monte_carlo_rademacher():
    spec = EnsembleSpec("rademacher", 50, 200, seed=23)
    vals = [les(window_spectrum(gen_ensemble(spec, i), standardized=False), NAGAO).value for i in range(800)]
    mc = np.var(vals, ddof=1)
    theory = clt_variance(NAGAO, CLTVarianceParams(0.25, ENTRY_K4["rademacher"]))
    assert abs(mc - theory) / theory < 0.2


def test_clt_smooth_functions_nonnegative():
    for phi in (LRT, WASSERSTEIN):
        assert clt_variance(phi, CLTVarianceParams(0.3)) > 0


def test_clt_params_validation():
    with pytest.raises(RmtlesError):
        CLTVarianceParams(1.2)
    with pytest.raises(RmtlesError):
        CLTVarianceParams(0.5, quadrature_points=8)


# -- LES -----------------------------------------------------------------------


def test_les_sum_and_normalization():
    spec = EigenSpectrum(np.array([0.5, 1.0, 2.0]), 3, 0.5)
    assert les(spec, NAGAO).value == pytest.approx(0.25 + 0.0 + 1.0)
    assert les(spec, "nagao", normalized_by_n=True).value == pytest.approx(1.25 / 3)
    assert les(spec, IDENTITY).value == pytest.approx(3.5)


def test_les_lrt_floor_and_zero():
    spec = EigenSpectrum(np.array([1e-15, 1.0]), 2, 0.5)
    f = les(spec, LRT)
    assert f.floored == 1
    assert f.value == pytest.approx(1e-12 - math.log(1e-12) - 1)
    with pytest.raises(RmtlesError):
        les(EigenSpectrum(np.array([0.0, 1.0]), 2, 0.5), LRT)


def test_les_vn_requires_trace_normalized():
    spec = EigenSpectrum(np.array([1.0, 1.0]), 2, 0.5)
    with pytest.raises(RmtlesError):
        les(spec, VN_ENTROPY)
    assert les(trace_normalize(spec), VN_ENTROPY).value == pytest.approx(math.log(2))


def test_unknown_test_function():
    with pytest.raises(RmtlesError):
        get_test_function("cosine")


def test_tabulated_matches_analytic():
    xs = np.linspace(0.0, 4.0, 81)
    phi = tabulated(xs, (xs - 1) ** 2, "nagao-table")
    spec = EigenSpectrum(np.array([0.3, 1.1, 2.7]), 3, 0.5)
    assert les(spec, phi).value == pytest.approx(les(spec, NAGAO).value, abs=1e-10)
    assert clt_variance(phi, CLTVarianceParams(0.25)) == pytest.approx(0.375, abs=1e-6)


def test_centered():
    np.testing.assert_allclose(centered([1.0, 2.0, 6.0]), [-2.0, -1.0, 3.0])


# -- entropies -----------------------------------------------------------------


def test_shannon_entropy():
    assert shannon_entropy([0.5, 0.5], base=2) == pytest.approx(1.0)
    assert shannon_entropy([1.0, 0.0]) == 0.0
    with pytest.raises(RmtlesError):
        shannon_entropy([0.5, 0.6])


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(2, 8))
def test_vn_entropy_is_spectral(seed, n):
    rng = np.random.default_rng(seed)
    d = rng.exponential(1.0, n)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    m = q @ np.diag(d) @ q.T
    m = (m + m.T) / 2
    assert von_neumann_entropy(m) == pytest.approx(shannon_entropy(d / d.sum()), abs=1e-10)
    assert von_neumann_entropy(3.7 * m) == pytest.approx(von_neumann_entropy(m), abs=1e-10)
