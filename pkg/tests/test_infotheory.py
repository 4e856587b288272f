import math
import warnings

import numpy as np
import pytest
from scipy import stats

from spiselect.errors import DataError, TooFewSamplesError
from spiselect.infotheory import (SpiRequest, box_kernel_mi, co_information, digamma,
                                  jitter_duplicates, knn_entropy, ksg_mi, multi_information,
                                  r_of_p, spi)
from spiselect.timeseries import ReconstructionParams, TimeSeries

EULER_GAMMA = 0.5772156649015329


def gaussian_pair(rho, n, seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    y = rho * x + math.sqrt(1 - rho * rho) * rng.standard_normal(n)
    return x, y


def gaussian_mi(rho):
    return -0.5 * math.log(1 - rho * rho)


class TestDigamma:
    def test_known_values(self):
        assert digamma(1) == pytest.approx(-EULER_GAMMA, abs=1e-10)
        assert digamma(2) == pytest.approx(1 - EULER_GAMMA, abs=1e-10)

    def test_recurrence(self):
        assert digamma(7.3) - digamma(6.3) == pytest.approx(1 / 6.3, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DataError):
            digamma(0)


class TestKSG:
    def test_independent_uniforms(self):
        rng = np.random.default_rng(0)
        assert abs(ksg_mi(rng.uniform(size=10_000), rng.uniform(size=10_000)).value) < 0.03

    @pytest.mark.parametrize("rho,tol", [(0.6, 0.02), (0.9, 0.03)])
    def test_gaussian(self, rho, tol):
        # a single draw scatters by ~0.01 nats; average a few to test the estimator
        est = np.mean([ksg_mi(*gaussian_pair(rho, 10_000, s), 4).value for s in range(5)])
        assert est == pytest.approx(gaussian_mi(rho), abs=tol)

    def test_symmetry_is_exact(self):
        x, y = gaussian_pair(0.5, 3000, 2)
        assert ksg_mi(x, y).value == ksg_mi(y, x).value
        xy = np.column_stack([x, y])
        z = x + 0.3 * np.random.default_rng(3).standard_normal(3000)
        assert ksg_mi(xy, z).value == ksg_mi(z, xy).value

    @pytest.mark.parametrize("scale,offset", [(4.0, -3.0), (0.125, 10.0), (2.5, 1.0)])
    def test_global_affine_invariance(self, scale, offset):
        x, y = gaussian_pair(0.7, 3000, 4)
        base = ksg_mi(x, y).value
        assert ksg_mi(scale * x + offset, scale * y + offset).value == base

    def test_k_robustness(self):
        x, y = gaussian_pair(0.6, 10_000, 5)
        vals = [ksg_mi(x, y, k).value for k in (4, 6, 8, 10)]
        assert max(vals) - min(vals) < 0.03

    def test_error_shrinks_with_more_data(self):
        target = gaussian_mi(0.6)

        def mean_err(n):
            return np.mean([abs(ksg_mi(*gaussian_pair(0.6, n, s)).value - target) for s in range(10)])
        assert mean_err(40_000) < mean_err(4_000)

    def test_duplicates_are_jittered_deterministically(self):
        x = np.repeat(np.arange(50.0), 4)
        y = x ** 2
        a, b = ksg_mi(x, y, seed=9).value, ksg_mi(x, y, seed=9).value
        assert a == b and math.isfinite(a)
        assert ksg_mi(x, y, seed=10).value != a

    def test_jitter_leaves_distinct_rows_alone(self):
        z = np.random.default_rng(0).normal(size=(50, 2))
        assert jitter_duplicates(z) is not None
        np.testing.assert_array_equal(jitter_duplicates(z), z)

    def test_jitter_amplitude(self):
        z = np.array([[0.0], [0.0], [10.0]])
        out = jitter_duplicates(z)
        assert np.abs(out - z).max() <= 1e-9

    def test_input_checks(self):
        with pytest.raises(TooFewSamplesError):
            ksg_mi(np.arange(4.0), np.arange(4.0), k=4)
        with pytest.raises(DataError):
            ksg_mi(np.arange(10.0), np.arange(9.0))


class TestBoxKernel:
    def test_huge_radius_gives_zero(self):
        x, y = gaussian_pair(0.8, 200, 6)
        assert box_kernel_mi(x, y, 1e6).value == 0.0

    def test_hand_example(self):
        x = np.array([0.0, 0.4, 1.0, 3.0])
        y = np.array([0.0, 0.3, 2.0, 2.2])
        # self-inclusive counts at r = 0.5 (max norm)
        # joint: {0,1},{0,1},{2},{3}; x: {0,1},{0,1},{2},{3}; y: {0,1},{0,1},{2,3},{2,3}
        cj, cx, cy = [2, 2, 1, 1], [2, 2, 1, 1], [2, 2, 2, 2]
        expected = np.mean([math.log(4 * j / (a * b)) for j, a, b in zip(cj, cx, cy)])
        assert box_kernel_mi(x, y, 0.5).value == pytest.approx(expected, abs=1e-12)

    def test_independent(self):
        rng = np.random.default_rng(7)
        assert abs(box_kernel_mi(rng.uniform(size=5000), rng.uniform(size=5000), 0.1).value) < 0.1

    def test_needs_positive_radius(self):
        with pytest.raises(DataError):
            box_kernel_mi(np.arange(5.0), np.arange(5.0), 0.0)


class TestEntropy:
    @pytest.mark.parametrize("width", [1.0, 2.0])
    def test_uniform(self, width):
        x = np.random.default_rng(8).uniform(0, width, 10_000)
        assert knn_entropy(x) == pytest.approx(math.log(width), abs=0.05)

    def test_gaussian(self):
        x = np.random.default_rng(9).standard_normal(10_000)
        assert knn_entropy(x) == pytest.approx(0.5 * math.log(2 * math.pi * math.e), abs=0.05)

    def test_shift_and_scale(self):
        x = np.random.default_rng(10).normal(size=(2000, 2))
        h = knn_entropy(x)
        assert knn_entropy(x + 7.0) == pytest.approx(h, abs=1e-9)
        assert knn_entropy(3.0 * x) == pytest.approx(h + 2 * math.log(3.0), abs=1e-9)


class TestSpi:
    def test_noise_carries_nothing(self):
        ts = TimeSeries(np.random.default_rng(11).standard_normal(50_000))
        for m, tau, p in [(1, 1, 1), (3, 2, 5)]:
            assert abs(spi(ts, ReconstructionParams(m, tau, p)).value) < 0.05

    def test_request_and_bare_params_agree(self):
        ts = TimeSeries(np.sin(np.arange(500) * 0.3) + 0.01 * np.arange(500))
        params = ReconstructionParams(2, 3, 1)
        assert spi(ts, params) == spi(ts, SpiRequest(params))

    def test_box_kernel_route(self):
        ts = TimeSeries(np.random.default_rng(12).standard_normal(2000))
        est = spi(ts, SpiRequest(ReconstructionParams(1), estimator="box_kernel", bandwidth=0.3))
        assert est.estimator == "box_kernel" and abs(est.value) < 0.1

    def test_request_validation(self):
        with pytest.raises(DataError):
            SpiRequest(ReconstructionParams(1), estimator="box_kernel")
        with pytest.raises(DataError):
            SpiRequest(ReconstructionParams(1), k=0)

    def test_bits(self):
        ts = TimeSeries(np.sin(np.arange(800) * 0.21))
        est = spi(ts, ReconstructionParams(2))
        assert est.bits == pytest.approx(est.value / math.log(2))


def ar1(rho, n, seed):
    rng = np.random.default_rng(seed)
    e = rng.standard_normal(n + 500)
    x = np.empty_like(e)
    x[0] = e[0]
    for i in range(1, len(e)):
        x[i] = rho * x[i - 1] + e[i]
    return TimeSeries(x[500:])


class TestRatio:
    def test_gaussian_ar1(self):
        rho = 0.8
        ts = ar1(rho, 50_000, 13)
        h = 0.5 * math.log(2 * math.pi * math.e / (1 - rho * rho))
        for p, ratio in r_of_p(ts, ReconstructionParams(1), 3):
            assert ratio == pytest.approx(gaussian_mi(rho ** p) / h, rel=0.10)

    def test_noise(self):
        ts = TimeSeries(np.random.default_rng(14).standard_normal(20_000))
        for _, ratio in r_of_p(ts, ReconstructionParams(1), 3):
            assert abs(ratio) < 0.02

    def test_non_positive_entropy_is_reported(self):
        ts = TimeSeries(np.random.default_rng(15).uniform(0, 0.1, 3000))
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            assert r_of_p(ts, ReconstructionParams(1), 2) == []
        assert any(issubclass(w.category, RuntimeWarning) for w in caught)

    def test_chaotic_ratio_decays(self, l96_trace):
        out = r_of_p(l96_trace, ReconstructionParams(2, 1), 100)
        p, ratio = zip(*out)
        assert stats.spearmanr(p, ratio)[0] < -0.8


class TestDiagnostics:
    def test_independent_triple(self):
        rng = np.random.default_rng(16)
        x, y, z = rng.standard_normal((3, 20_000))
        assert abs(co_information(x, y, z)) < 0.05
        assert abs(multi_information(x, y, z)) < 0.05

    def test_gaussian_multi_information(self):
        cov = np.array([[1.0, 0.5, 0.3], [0.5, 1.0, 0.4], [0.3, 0.4, 1.0]])
        s = np.random.default_rng(17).multivariate_normal(np.zeros(3), cov, 20_000)
        expected = 0.5 * math.log(np.prod(np.diag(cov)) / np.linalg.det(cov))
        assert multi_information(s[:, 0], s[:, 1], s[:, 2]) == pytest.approx(expected, abs=0.05)

    def test_duplicated_variable(self):
        x, y = gaussian_pair(0.5, 5000, 18)
        z = x.copy()
        assert multi_information(x, y, z) > co_information(x, y, z)


class TestBenchmarkValues:
    def test_lorenz96_low_dimensional_reconstruction(self, l96_trace):
        assert spi(l96_trace, ReconstructionParams(2, 1, 1)).value == pytest.approx(5.303, rel=0.15)

    def test_lorenz96_heuristic_reconstruction(self, l96_trace):
        assert spi(l96_trace, ReconstructionParams(8, 26, 1)).value == pytest.approx(3.463, rel=0.15)


def scan_ksg2(x, y, k):
    """Algorithm 2 by exhaustive pairwise distances."""
    n = len(x)
    dx = np.abs(x[:, None] - x[None, :])
    dy = np.abs(y[:, None] - y[None, :])
    dz = np.maximum(dx, dy)
    np.fill_diagonal(dz, np.inf)
    total = 0.0
    for i in range(n):
        nb = np.argsort(dz[i], kind="stable")[:k]
        ex, ey = dx[i, nb].max(), dy[i, nb].max()
        nx = max((dx[i] <= ex).sum() - 1, 1)
        ny = max((dy[i] <= ey).sum() - 1, 1)
        total += digamma(nx) + digamma(ny)
    return digamma(k) - 1 / k - total / n + digamma(n)


@pytest.mark.parametrize("rho,k", [(0.0, 4), (0.5, 4), (0.9, 3), (0.7, 8)])
def test_ksg_matches_exhaustive_reference(rho, k):
    x, y = gaussian_pair(rho, 600, int(10 * rho) + k)
    assert ksg_mi(x, y, k).value == pytest.approx(scan_ksg2(x, y, k), abs=1e-12)
