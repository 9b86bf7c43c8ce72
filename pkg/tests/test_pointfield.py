import numpy as np
import pytest

from detfield.fredholm import HypothesisError, det_gap
from detfield.pointfield import (
    CountDistribution,
    correlation,
    count_distribution,
    density_ratio,
    gap_probability,
    generating_function,
    sample_count,
    spectrum_for_case,
)


def vandermonde_coefficients(eigs):
    """Recover p_n by interpolating the generating polynomial: the oracle."""
    n = len(eigs)
    zs = np.exp(2j * np.pi * np.arange(n + 1) / (n + 1)) * 0.9 + 0.05
    vals = [generating_function(eigs, z) for z in zs]
    V = np.vander(zs, n + 1, increasing=True)
    return np.linalg.solve(V, vals).real


class TestSpectrum:
    def test_case_i_scalar(self, one_state):
        eigs = spectrum_for_case(one_state, 0.0, "i")
        assert np.allclose(eigs, [0.5], atol=1e-14)

    def test_case_ii_square(self, one_state):
        eigs = spectrum_for_case(one_state, 0.0, "ii")
        assert np.allclose(eigs, [0.25], atol=1e-14)

    def test_case_iii_matches_ii_for_selfadjoint(self, random_selfadjoint):
        a = np.sort(spectrum_for_case(random_selfadjoint, 0.2, "ii"))
        b = np.sort(spectrum_for_case(random_selfadjoint, 0.2, "iii"))
        assert np.abs(a - b).max() < 1e-10

    def test_case_iii_real_spectrum(self, random_complex):
        eigs = spectrum_for_case(random_complex, 0.1, "iii")
        assert np.all(eigs >= 0.0) and np.all(eigs <= 1.0)

    def test_case_i_requires_selfadjoint(self, random_complex):
        with pytest.raises(HypothesisError):
            spectrum_for_case(random_complex, 0.0, "i")

    def test_norm_hypothesis_enforced(self, soliton):
        # c = sqrt(2) puts ||Q_0|| exactly at 1
        with pytest.raises(HypothesisError):
            spectrum_for_case(soliton, 0.0, "i")


class TestGeneratingFunction:
    def test_at_one(self):
        assert generating_function([0.3, 0.7, 0.1], 1.0) == 1.0

    def test_half_at_zero(self):
        assert abs(generating_function([0.5], 0.0) - 0.5) < 1e-15

    def test_two_halves_at_two(self):
        assert abs(generating_function([0.5, 0.5], 2.0) - 2.25) < 1e-14


class TestCountDistribution:
    def test_single_half(self):
        cd = count_distribution([0.5])
        assert np.allclose(cd.probabilities, [0.5, 0.5])

    def test_two_independent_bernoullis(self):
        cd = count_distribution([0.5, 0.5])
        assert np.allclose(cd.probabilities, [0.25, 0.5, 0.25])

    def test_vandermonde_oracle(self, rng):
        eigs = rng.uniform(0.05, 0.95, 6)
        cd = count_distribution(eigs)
        assert np.abs(cd.probabilities - vandermonde_coefficients(eigs)).max() < 1e-10

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            count_distribution([1.2])

    def test_clamps_with_warning(self):
        with pytest.warns(UserWarning, match="clamped"):
            cd = count_distribution([1.0 + 5e-11])
        assert cd.eigenvalues[0] == 1.0

    def test_normalization_and_mean(self, rng):
        eigs = rng.uniform(0.0, 1.0, 8)
        cd = count_distribution(eigs)
        assert abs(cd.probabilities.sum() - 1.0) < 1e-12
        assert np.all(cd.probabilities >= 0.0)
        mean = np.dot(np.arange(len(cd.probabilities)), cd.probabilities)
        assert abs(mean - eigs.sum()) < 1e-12

    def test_mean_matches_derivative_at_one(self, rng):
        eigs = rng.uniform(0.0, 1.0, 5)
        h = 1e-6
        fd = (generating_function(eigs, 1.0 + h) - generating_function(eigs, 1.0 - h)).real / (2 * h)
        assert abs(fd - eigs.sum()) < 1e-6


class TestGapProbability:
    def test_single(self):
        assert gap_probability(count_distribution([0.5])) == 0.5

    def test_empty(self):
        assert gap_probability(count_distribution([])) == 1.0

    def test_matches_gap_determinant(self, random_selfadjoint):
        for x in (0.0, 0.4):
            cd = count_distribution(spectrum_for_case(random_selfadjoint, x, "i"))
            assert abs(gap_probability(cd) - det_gap(random_selfadjoint, x)) < 1e-12


class TestDensityRatio:
    def test_scalar_closed_form(self, one_state):
        for x in (0.0, 0.5, 1.5):
            expect = np.exp(-2 * x) / (1 - np.exp(-2 * x) / 2)
            assert abs(density_ratio(one_state, x) - expect) < 1e-13

    def test_matches_log_derivative(self, random_selfadjoint):
        h = 1e-5
        for x in (0.2, 0.8):
            fd = (np.log(det_gap(random_selfadjoint, x + h)) - np.log(det_gap(random_selfadjoint, x - h))) / (2 * h)
            assert abs(density_ratio(random_selfadjoint, x) - fd) < 1e-6

    def test_vanishes_at_infinity(self, one_state):
        assert density_ratio(one_state, 20.0) < 1e-15


class TestCorrelation:
    def test_one_point(self):
        K = lambda a, b: np.exp(-a - b)
        assert abs(correlation(K, [0.7]) - np.exp(-1.4)) < 1e-15

    def test_duplicated_point_vanishes(self):
        K = lambda a, b: np.cos(a - b)
        assert abs(correlation(K, [0.5, 0.5])) < 1e-14

    def test_rank_one_kernel_two_points(self):
        K = lambda a, b: np.exp(-a - b)
        assert abs(correlation(K, [0.3, 1.1])) < 1e-15


class TestSampling:
    def test_sure_events(self):
        assert sample_count(count_distribution([1.0]), 7) == 1
        assert sample_count(count_distribution([0.0]), 7) == 0

    def test_empirical_mean_in_ci(self):
        cd = count_distribution([0.5])
        rng = np.random.default_rng(42)
        n = 100_000
        draws = np.array([sample_count(cd, rng) for _ in range(n)])
        sigma = 0.5 / np.sqrt(n)
        assert abs(draws.mean() - 0.5) < 3 * sigma

    def test_deterministic_given_seed(self):
        cd = count_distribution([0.3, 0.6])
        a = [sample_count(cd, 123) for _ in range(5)]
        b = [sample_count(cd, 123) for _ in range(5)]
        assert a == b


class TestCountDistributionType:
    def test_rejects_bad_probabilities(self):
        with pytest.raises(ValueError):
            CountDistribution(eigenvalues=np.array([0.5]), probabilities=np.array([0.7, 0.7]))
