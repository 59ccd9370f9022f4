import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rmtles.errors import RmtlesError
from rmtles.features import (
    STAT_NAMES,
    bandpass_mask,
    bin_frequencies,
    dft,
    dft_direct,
    idft,
    parseval_gap,
    stat_features,
)
from rmtles.ingest import Recording, WindowMatrix


def test_stat_features_by_hand():
    w = WindowMatrix(np.array([[1.0, 2.0, 4.0, 5.0], [-1.0, 1.0, -1.0, 1.0]]), 3, "s", "HC", ("a", "b"))
    f = stat_features(w)
    assert f.names[:7] == tuple(f"a_{s}" for s in STAT_NAMES)
    a = dict(zip(STAT_NAMES, f.values[:7]))
    assert a["harmonic_mean"] == pytest.approx(4 / (1 + 1 / 2 + 1 / 4 + 1 / 5))
    assert a["std_dev"] == pytest.approx(math.sqrt(10 / 3))
    assert a["mean_deviation"] == pytest.approx(1.5)
    assert a["kurtosis"] == pytest.approx((2 * 2**4 + 2 * 1**4) / 4 / 2.5**2)
    assert a["rms"] == pytest.approx(math.sqrt(46 / 4))
    assert a["peak"] == 5.0
    assert a["range"] == 4.0
    b = dict(zip(STAT_NAMES, f.values[7:]))
    assert math.isnan(b["harmonic_mean"])
    assert f.flagged.tolist() == [False] * 7 + [True] + [False] * 6
    assert (f.window_index, f.subject_id, f.label) == (3, "s", "HC")


def test_constant_channel_kurtosis_nan():
    f = stat_features(WindowMatrix(np.full((1, 5), 2.0)))
    vals = dict(zip(STAT_NAMES, f.values))
    assert math.isnan(vals["kurtosis"])
    assert vals["harmonic_mean"] == pytest.approx(2.0)
    assert vals["std_dev"] == 0.0


LENGTHS = [1, 2, 3, 5, 7, 8, 12, 31, 32, 33, 64, 100, 127, 256, 1000, 1024, 4097]


@pytest.mark.parametrize("n", LENGTHS)
def test_dft_matches_numpy(n):
    rng = np.random.default_rng(n)
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    ref = np.fft.fft(x)
    scale = max(np.max(np.abs(ref)), 1.0)
    for method in ("direct", "fast", "auto"):
        if method == "direct" and n > 1100:
            continue
        assert np.max(np.abs(dft(x, method) - ref)) < 1e-11 * scale
    np.testing.assert_allclose(idft(ref), x, atol=1e-11 * scale)


def test_dft_batched_rows():
    x = np.random.default_rng(0).standard_normal((3, 20))
    np.testing.assert_allclose(dft(x), np.fft.fft(x, axis=-1), atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 300), seed=st.integers(0, 10_000), alpha=st.floats(-3, 3))
def test_dft_linear_roundtrip_parseval(n, seed, alpha):
    rng = np.random.default_rng(seed)
    x, y = rng.standard_normal(n), rng.standard_normal(n)
    np.testing.assert_allclose(dft(alpha * x + y), alpha * dft(x) + dft(y), atol=1e-9)
    np.testing.assert_allclose(idft(dft(x)).real, x, atol=1e-11)
    assert parseval_gap(x) < 1e-11


def test_dft_unknown_method():
    with pytest.raises(RmtlesError):
        dft(np.ones(4), "magic")


def test_bin_frequencies():
    # the even-length Nyquist bin is reported as +fs/2
    np.testing.assert_allclose(bin_frequencies(8, 8.0), [0, 1, 2, 3, 4, -3, -2, -1])
    np.testing.assert_allclose(np.abs(bin_frequencies(8, 8.0)), np.abs(np.fft.fftfreq(8, 1 / 8.0)))
    np.testing.assert_allclose(bin_frequencies(7, 100.0), np.fft.fftfreq(7, 1 / 100.0))


def test_bandpass_isolates_tone():
    fs, t = 1000.0, 1000
    time = np.arange(t) / fs
    low = np.sin(2 * np.pi * 10 * time)
    high = np.sin(2 * np.pi * 120 * time)
    rec = Recording(np.stack([low + high, 2 * high]), ["a", "b"], fs)
    out = bandpass_mask(rec, 5.0, 20.0)
    np.testing.assert_allclose(out.data[0], low, atol=1e-9)
    np.testing.assert_allclose(out.data[1], 0.0, atol=1e-9)
    assert out.channel_names == rec.channel_names


@pytest.mark.parametrize("lo,hi", [(-1.0, 10.0), (10.0, 5.0), (10.0, 600.0)])
def test_bandpass_rejects_bad_band(lo, hi):
    rec = Recording(np.random.default_rng(0).standard_normal((2, 50)), ["a", "b"], 1000.0)
    with pytest.raises(RmtlesError):
        bandpass_mask(rec, lo, hi)
