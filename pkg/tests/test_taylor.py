import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdsic.channel import ChannelTap, MultipathChannel, apply_channel, default_path_loss
from fdsic.signals import make_signal
from fdsic.taylor import (TaylorChannel, distance_error_curve,
                          lemma_bound, reconstruct, taylor_coeffs,
                          total_error_budget)

FC = 2.395e9


def single_tap_channel(gain=1.0, delay=0.0, fc=FC):
    return MultipathChannel(taps=(ChannelTap(gain, delay),), carrier_hz=fc)


def brute_force_coeff(taps, fc, n):
    """Independent re-summation with python scalars and math module."""
    import cmath
    import math
    total = 0j
    for gain, delay in taps:
        total += (gain * delay**n / math.factorial(n)
                  * cmath.exp(-2j * math.pi * fc * delay))
    return total


class TestTaylorCoeffs:
    def test_single_tap_identity(self):
        tc = taylor_coeffs(single_tap_channel(1.0, 0.0), 3)
        assert tc.coeffs[0] == pytest.approx(1.0)
        for c in tc.coeffs[1:]:
            assert abs(c) == 0.0

    def test_single_tap_magnitudes(self):
        a, tau = 0.3, 1.7e-9
        tc = taylor_coeffs(single_tap_channel(a, tau), 4)
        import math
        for n, c in enumerate(tc.coeffs):
            assert abs(c) == pytest.approx(a * tau**n / math.factorial(n), rel=1e-12)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(17)
        taps = [(rng.uniform(0.01, 1.0), rng.uniform(0.1e-9, 3e-9)) for _ in range(2)]
        ch = MultipathChannel(taps=tuple(ChannelTap(g, d) for g, d in taps),
                              carrier_hz=FC)
        tc = taylor_coeffs(ch, 2)
        for n in range(3):
            ref = brute_force_coeff(taps, FC, n)
            assert abs(tc.coeffs[n] - ref) <= 1e-15 * max(abs(ref), 1e-15)

    def test_order_cap(self):
        with pytest.raises(ValueError):
            taylor_coeffs(single_tap_channel(), 5)


@given(delays=st.lists(st.floats(0.1e-9, 3e-9), min_size=1, max_size=4),
       gains=st.lists(st.floats(0.01, 1.0), min_size=4, max_size=4))
@settings(max_examples=25, deadline=None)
def test_conjugate_symmetry(delays, gains):
    taps = tuple(ChannelTap(g, d) for g, d in zip(gains, delays))
    plus = taylor_coeffs(MultipathChannel(taps=taps, carrier_hz=FC), 3)
    # conjugated phase factors: evaluate with f_c -> -f_c via direct sum
    import cmath
    import math
    for n in range(4):
        conj_ref = sum(t.gain * t.delay_s**n / math.factorial(n)
                       * cmath.exp(+2j * math.pi * FC * t.delay_s) for t in taps)
        assert abs(plus.coeffs[n].conjugate() - conj_ref) <= 1e-14 * max(abs(conj_ref), 1e-20)


def periodic_flat_noise(n, fs, half_band_hz, seed=0):
    """Unit-power periodic noise flat over |f| <= half_band_hz, plus its
    exact spectral derivatives."""
    rng = np.random.default_rng(seed)
    freqs = np.fft.fftfreq(n, 1 / fs)
    spectrum = np.zeros(n, dtype=complex)
    mask = np.abs(freqs) <= half_band_hz
    spectrum[mask] = rng.standard_normal(mask.sum()) + 1j * rng.standard_normal(mask.sum())
    x = np.fft.ifft(spectrum)
    scale = np.sqrt(np.mean(np.abs(x) ** 2))
    spectrum /= scale
    x = x / scale
    d1 = np.fft.ifft(spectrum * (2j * np.pi * freqs))
    d2 = np.fft.ifft(spectrum * (2j * np.pi * freqs) ** 2)
    return x, d1, d2


class TestReconstruct:
    def test_order_zero(self):
        x = make_signal(np.exp(2j * np.pi * 0.01 * np.arange(1024)), 80e6)
        tc = TaylorChannel(coeffs=(0.5 - 0.2j,))
        y = reconstruct(tc, x)
        assert np.max(np.abs(y.samples - (0.5 - 0.2j) * x.samples)) <= 1e-12

    def test_zero_c1_ignores_derivative(self):
        x = make_signal(np.exp(2j * np.pi * 0.01 * np.arange(1024)), 80e6)
        junk = make_signal(np.random.default_rng(0).standard_normal(1024) + 0j, 80e6)
        zero = make_signal(np.full(1024, 1e-300, dtype=complex), 80e6)
        tc = TaylorChannel(coeffs=(1.0, 0.0))
        ya = reconstruct(tc, x, [junk])
        yb = reconstruct(tc, x, [zero])
        assert np.array_equal(ya.samples, yb.samples)

    def test_missing_derivatives_rejected(self):
        x = make_signal(np.ones(256, dtype=complex), 80e6)
        tc = TaylorChannel(coeffs=(1.0, 0.1))
        with pytest.raises(ValueError):
            reconstruct(tc, x)

    def test_single_tap_first_order_error_within_bound(self):
        # periodic noise whose angular band 1/T matches the spectral
        # occupancy assumed by the sinc-pulse bound
        fs = 80e6
        W = 20e6
        T = 1 / W
        half_band = 1 / (2 * np.pi * T)
        xs, d1, _ = periodic_flat_noise(65536, fs, half_band, seed=12)
        x = make_signal(xs, fs)
        tau = 0.01 * T
        ch = single_tap_channel(1.0, tau, fc=2.395e9)
        truth = apply_channel(ch, x)
        tc = taylor_coeffs(ch, 1)
        model = reconstruct(tc, x, [make_signal(d1, fs)])
        err = np.mean(np.abs(truth.samples - model.samples) ** 2)
        assert err <= lemma_bound(ch.taps[0], T)


class TestLemmaBound:
    def test_reference_value(self):
        assert lemma_bound(ChannelTap(1.0, 0.01), 1.0) == pytest.approx(7.5e-10)

    def test_zero_delay(self):
        assert lemma_bound(ChannelTap(1.0, 0.0), 1.0) == 0.0

    def test_quartic_scaling(self):
        b1 = lemma_bound(ChannelTap(1.0, 1e-9), 1e-7)
        b2 = lemma_bound(ChannelTap(1.0, 2e-9), 1e-7)
        assert b2 / b1 == pytest.approx(16.0)

    def test_rejects_bad_T(self):
        with pytest.raises(ValueError):
            lemma_bound(ChannelTap(1.0, 1e-9), 0.0)


class TestTotalErrorBudget:
    def test_additivity_order1(self, default_channel):
        T = 1 / 20e6
        budget = total_error_budget(default_channel, T, 1)
        direct = sum(lemma_bound(t, T) for t in default_channel.taps)
        assert budget.total_bound == pytest.approx(direct, rel=1e-12)

    def test_ct_minus4_reference(self):
        # (cT)^-4 for T = 50 ns is about -47 dB
        c = 299792458.0
        T = 50e-9
        assert 10 * np.log10((c * T) ** -4) == pytest.approx(-47.0, abs=0.1)

    def test_order2_below_order1_for_small_delays(self):
        T = 1.0
        for tau_over_T in (0.01, 0.05, 0.1, 0.2, 0.27):
            ch = single_tap_channel(1.0, tau_over_T * T, fc=1e12)
            b1 = total_error_budget(ch, T, 1).total_bound
            b2 = total_error_budget(ch, T, 2).total_bound
            assert b2 <= b1

    def test_unsupported_order(self, default_channel):
        with pytest.raises(ValueError):
            total_error_budget(default_channel, 1e-7, 3)


class TestDistanceErrorCurve:
    def test_flat_in_power_law_region(self):
        model = default_path_loss()
        T = 1 / 20e6
        # all distances beyond the cap crossover: alpha = 4 makes the curve flat
        pts = distance_error_curve(model, T, [0.2, 0.5, 1.0, 2.0])
        vals = [v for _, v in pts]
        assert max(vals) - min(vals) <= 1e-9

    def test_max_below_minus_100db(self):
        model = default_path_loss()
        T = 1 / 20e6
        d = np.linspace(0.05, 5.0, 400)
        vals = [v for _, v in distance_error_curve(model, T, d)]
        assert max(vals) <= -100.0

    def test_halving_T_raises_12db(self):
        model = default_path_loss()
        d = [0.1, 0.4, 1.0]
        a = dict(distance_error_curve(model, 1 / 20e6, d))
        b = dict(distance_error_curve(model, 1 / 40e6, d))
        for k in d:
            assert b[k] - a[k] == pytest.approx(10 * np.log10(16.0), abs=1e-9)

    def test_rejects_nonpositive_distance(self):
        with pytest.raises(ValueError):
            distance_error_curve(default_path_loss(), 1e-7, [0.0])
