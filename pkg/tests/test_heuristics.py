import numpy as np
import pytest

from spiselect.errors import SeriesTooShortError
from spiselect.heuristics import (ami_curve, ami_first_minimum_tau, fnn_dimension, fnn_fraction,
                                  histogram_mi)
from spiselect.timeseries import TimeSeries

SINE = TimeSeries(np.sin(2 * np.pi * np.arange(20_000) / 100))


def noisy_sine(n=200_000, period=100, noise=0.1, seed=0):
    # noise smooths the histogram estimate; a bare sine sits on a value lattice
    rng = np.random.default_rng(seed)
    return TimeSeries(np.sin(2 * np.pi * np.arange(n) / period) + noise * rng.standard_normal(n))


def ar1(phi, n=20_000, seed=0):
    rng = np.random.default_rng(seed)
    x = np.zeros(n)
    eps = rng.standard_normal(n)
    for i in range(1, n):
        x[i] = phi * x[i - 1] + eps[i]
    return TimeSeries(x)


def test_histogram_mi_of_independent_bins_is_small():
    rng = np.random.default_rng(0)
    edges = np.linspace(0, 1, 9)
    assert histogram_mi(rng.uniform(size=50_000), rng.uniform(size=50_000), edges) < 0.01


def test_histogram_mi_of_identical_samples_is_entropy():
    x = np.repeat(np.arange(4) + 0.5, 100)
    assert histogram_mi(x, x, np.arange(5.0)) == pytest.approx(np.log(4))


class TestAmi:
    def test_sine_quarter_period(self):
        res = ami_first_minimum_tau(noisy_sine(), 60)
        assert res.ok and abs(res.value - 25) <= 2

    def test_curve_shape(self):
        curve = ami_curve(SINE, 10)
        assert [t for t, _ in curve] == list(range(1, 11))
        assert all(v >= 0 for _, v in curve)

    def test_affine_invariant_minimum(self, l96_trace):
        a = ami_first_minimum_tau(l96_trace, 60)
        b = ami_first_minimum_tau(TimeSeries(3.0 * l96_trace.values - 7.0), 60)
        assert a.value == b.value

    def test_lorenz96(self, l96_trace):
        res = ami_first_minimum_tau(l96_trace)
        assert res.ok and abs(res.value - 26) <= 3

    def test_logistic_fails(self, logistic_trace):
        res = ami_first_minimum_tau(logistic_trace)
        assert res.status == "failed" and res.value is None
        assert len(res.diagnostic_curve) == 100

    def test_monotone_curve_has_no_minimum(self):
        # AR(1) mutual information decays strictly with the lag
        res = ami_first_minimum_tau(ar1(0.95), 20)
        assert not res.ok and res.value is None

    def test_short_series(self):
        with pytest.raises(SeriesTooShortError):
            ami_curve(TimeSeries(np.arange(10.0)), 20)

    def test_deterministic(self, henon_trace):
        assert ami_first_minimum_tau(henon_trace, 30) == ami_first_minimum_tau(henon_trace, 30)


class TestFnn:
    def test_sine_embeds_in_plane(self):
        # an irrational period keeps the embedded points from repeating exactly
        res = fnn_dimension(TimeSeries(np.sin(np.arange(20_000) / 16)), 25)
        assert res.ok and res.value == 2

    def test_fraction_in_unit_interval(self, henon_trace):
        for m in range(1, 6):
            assert 0.0 <= fnn_fraction(henon_trace.values, m, 1) <= 1.0

    def test_torus_signal(self):
        t = np.arange(30_000)
        x = np.sin(2 * np.pi * t / 97) + 0.6 * np.sin(2 * np.pi * t / (97 * 1.618034))
        res = fnn_dimension(TimeSeries(x), 24)
        assert res.ok and res.value <= 5  # a 2-torus embeds by 2D + 1

    def test_henon_is_two_dimensional(self, henon_trace):
        res = fnn_dimension(henon_trace, 1)
        assert res.ok and res.value == 2

    def test_deterministic(self, henon_trace):
        assert fnn_dimension(henon_trace, 1) == fnn_dimension(henon_trace, 1)

    def test_short_series(self):
        with pytest.raises(SeriesTooShortError):
            fnn_dimension(TimeSeries(np.arange(20.0)), 5, m_max=5)

    @pytest.mark.xfail(reason="default thresholds stop at m=5 on this trajectory; see notes",
                       strict=False)
    def test_lorenz96_dimension(self, l96_trace):
        res = fnn_dimension(l96_trace, 26)
        assert res.ok and abs(res.value - 8) <= 1

    @pytest.mark.xfail(reason="saddle-region recurrences keep the false fraction near 3%",
                       strict=False)
    def test_lorenz63_dimension(self, l63_trace):
        tau = ami_first_minimum_tau(l63_trace).value
        res = fnn_dimension(l63_trace, tau)
        assert res.ok and abs(res.value - 5) <= 1
