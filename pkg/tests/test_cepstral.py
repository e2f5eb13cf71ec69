import numpy as np
import pytest
from conftest import SR, sine
from hypothesis import given, settings
from hypothesis import strategies as st
from oracles import (
    biased_autocorr,
    delta_replicated,
    lpcc_straight,
    mfcc_definition,
    naive_dft_magnitudes,
    yule_walker,
)

from emofuse.cepstral import (
    LpcModel,
    autocorr_biased,
    cepstral_features,
    delta,
    formants,
    levinson,
    lpc,
    lpcc,
    mel_filterbank,
    mfcc,
)
from emofuse.dataset import Signal, frame_signal
from emofuse.lowlevel import Spectrum, analysis_frames, spectrum


def pole_pair_model(radius, freq, sr=SR):
    theta = 2 * np.pi * freq / sr
    a = np.array([2 * radius * np.cos(theta), -(radius**2)])
    return LpcModel(a, 1.0, np.zeros(2))


def ar2(n, a1, a2, seed):
    e = np.random.default_rng(seed).standard_normal(n + 500)
    x = np.zeros_like(e)
    for t in range(2, len(e)):
        x[t] = a1 * x[t - 1] + a2 * x[t - 2] + e[t]
    return x[500:]


# --- mfcc -------------------------------------------------------------------

def test_filterbank_shape_and_coverage():
    fb = mel_filterbank(SR)
    assert fb.weights.shape == (26, 129)
    assert np.all(fb.weights >= 0) and np.all(fb.weights <= 1)
    assert np.all(fb.weights.sum(axis=1) > 0)
    assert np.all(np.diff(fb.centers_hz) > 0)


def test_mfcc_zero_frame():
    c = mfcc(spectrum(np.zeros(200), SR))
    assert c.shape == (12,)
    np.testing.assert_allclose(c, 0.0, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_mfcc_matches_definition(seed):
    x = np.random.default_rng(seed).standard_normal(200)
    mags = naive_dft_magnitudes(x)
    fast = mfcc(spectrum(x, SR))
    ref = mfcc_definition(mags, SR)
    assert np.max(np.abs(fast - ref)) <= 1e-8


def test_mfcc_scale_invariant(rng):
    x = rng.standard_normal(200)
    np.testing.assert_allclose(mfcc(spectrum(3.7 * x, SR)), mfcc(spectrum(x, SR)), atol=1e-9)


def test_mfcc_filterbank_mismatch():
    with pytest.raises(ValueError):
        mfcc(Spectrum(np.ones(65), SR, 128), mel_filterbank(SR))


# --- delta ------------------------------------------------------------------

def test_delta_constant_and_linear():
    np.testing.assert_array_equal(delta(np.ones((7, 12))), 0.0)
    v = np.arange(1, 13, dtype=float)
    series = np.arange(9)[:, None] * v
    np.testing.assert_allclose(delta(series)[2:-2], np.tile(v, (5, 1)))


def test_delta_matches_replication_oracle(rng):
    for T in (1, 2, 3, 6):
        c = rng.standard_normal((T, 12))
        np.testing.assert_allclose(delta(c), delta_replicated(c), atol=1e-14)


def test_delta_three_frame_boundary():
    c = np.array([[0.0], [1.0], [4.0]])
    # t=0: (1*(1-0) + 2*(4-0)) / 10
    assert delta(c)[0, 0] == pytest.approx(0.9)
    assert delta(c)[2, 0] == pytest.approx((1 * (4 - 1) + 2 * (4 - 0)) / 10)


# --- lpc --------------------------------------------------------------------

def test_lpc_ar1_identity():
    a, err, k = levinson(0.5 ** np.arange(2), 1)
    assert a[0] == pytest.approx(0.5)
    assert err == pytest.approx(0.75)


def test_lpc_white_noise_autocorrelation():
    r = np.zeros(13)
    r[0] = 1.0
    a, err, k = levinson(r)
    np.testing.assert_array_equal(a, 0.0)
    assert err == 1.0


def test_lpc_zero_frame():
    m = lpc(np.zeros(200))
    np.testing.assert_array_equal(m.coefficients, 0.0)
    assert m.gain == 0.0


def test_autocorr_matches_oracle(rng):
    x = rng.standard_normal(50)
    np.testing.assert_allclose(autocorr_biased(x, 12)[0], biased_autocorr(x, 12), atol=1e-13)


@pytest.mark.parametrize("seed", range(8))
def test_lpc_matches_yule_walker(seed):
    x = analysis_frames(np.random.default_rng(seed).standard_normal(200))
    ref = yule_walker(biased_autocorr(x, 12), 12)
    m = lpc(x)
    assert np.max(np.abs(m.coefficients - ref)) <= 1e-8
    assert np.all(np.abs(m.reflection) < 1)


def test_lpc_batch_equals_rows(rng):
    X = rng.standard_normal((5, 200))
    batch = lpc(X)
    for i in range(5):
        np.testing.assert_allclose(batch.coefficients[i], lpc(X[i]).coefficients, atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_ar2_recovery(seed):
    x = ar2(4096, 1.0, -0.5, seed)
    m = lpc(x, order=2)
    np.testing.assert_allclose(m.coefficients, [1.0, -0.5], atol=0.02)
    np.testing.assert_allclose(m.coefficients, yule_walker(biased_autocorr(x, 2), 2), atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_reflection_inside_unit_circle(seed, order):
    x = np.random.default_rng(seed).standard_normal(200)
    m = lpc(x, order)
    assert np.all(np.abs(m.reflection) < 1)
    assert np.all(np.isfinite(m.coefficients)) and m.gain > 0


# --- lpcc -------------------------------------------------------------------

def test_lpcc_examples():
    zero = LpcModel(np.zeros(12), 0.0, np.zeros(12))
    np.testing.assert_array_equal(lpcc(zero), 0.0)
    c = lpcc(LpcModel(np.array([0.5, 0.25] + [0.0] * 10), 1.0, np.zeros(12)))
    assert c.shape == (11,)
    assert c[0] == 0.5
    assert c[1] == pytest.approx(0.375)


@pytest.mark.parametrize("order", [2, 5, 12, 14])
def test_lpcc_matches_straight_recursion(order, rng):
    a = rng.uniform(-0.6, 0.6, order)
    got = lpcc(LpcModel(a, 1.0, np.zeros(order)))
    assert got[0] == a[0]
    np.testing.assert_allclose(got, lpcc_straight(a), atol=1e-12)


# --- formants ---------------------------------------------------------------

def test_formant_single_pole_pair():
    f = formants(pole_pair_model(0.98, 500.0), SR)
    assert f.shape == (5,)
    assert abs(f[0] - 500.0) <= 1.0
    np.testing.assert_array_equal(f[1:], 0.0)


def test_formant_pole_pair_from_synthetic_audio():
    # resonator driven by noise; the order-2 LPC fit should land near 500 Hz
    theta = 2 * np.pi * 500 / SR
    a1, a2 = 2 * 0.98 * np.cos(theta), -(0.98**2)
    x = ar2(16000, a1, a2, seed=3)
    f = formants(lpc(x, order=2), SR)
    assert abs(f[0] - 500.0) <= 5.0


def test_formants_degenerate():
    np.testing.assert_array_equal(formants(LpcModel(np.zeros(12), 0.0, np.zeros(12)), SR), 0.0)
    real = LpcModel(np.array([0.8, -0.15]), 1.0, np.zeros(2))  # poles 0.5, 0.3
    np.testing.assert_array_equal(formants(real, SR), 0.0)


def test_formants_wide_or_edge_poles_dropped():
    assert formants(pole_pair_model(0.8, 1000.0), SR)[0] == 0.0  # bandwidth ~ 1136 Hz
    assert formants(pole_pair_model(0.99, 60.0), SR)[0] == 0.0
    assert formants(pole_pair_model(0.99, 7990.0), SR)[0] == 0.0


def test_formants_sorted_with_trailing_zeros():
    poles = [(0.97, 2500.0), (0.98, 700.0), (0.96, 1200.0)]
    poly = np.array([1.0])
    for r, f in poles:
        th = 2 * np.pi * f / SR
        poly = np.convolve(poly, [1.0, -2 * r * np.cos(th), r * r])
    got = formants(LpcModel(-poly[1:], 1.0, np.zeros(6)), SR)
    np.testing.assert_allclose(got[:3], [700, 1200, 2500], atol=1e-6)
    np.testing.assert_array_equal(got[3:], 0.0)


def test_formants_need_order_two():
    with pytest.raises(ValueError):
        formants(LpcModel(np.array([0.5]), 1.0, np.zeros(1)), SR)


# --- per-frame bundle --------------------------------------------------------

def test_cepstral_features_shapes():
    x = sine(220, 3200, amp=0.4) + 0.01 * np.random.default_rng(0).standard_normal(3200)
    fs = frame_signal(Signal(x))
    cf = cepstral_features(fs)
    T = len(fs)
    assert cf.mfcc.shape == (T, 12) and cf.delta_mfcc.shape == (T, 12)
    assert cf.lpcc.shape == (T, 11) and cf.formants.shape == (T, 5)
    for arr in (cf.mfcc, cf.delta_mfcc, cf.lpcc, cf.formants):
        assert np.all(np.isfinite(arr))
    for row in cf.formants:
        nz = row[row > 0]
        assert np.all(np.diff(nz) > 0)
        assert np.all(row[len(nz):] == 0)
