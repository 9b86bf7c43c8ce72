import numpy as np
import pytest

from detfield.kernels import (
    HamiltonianKernel,
    airy,
    airy_deriv,
    airy_kernel,
    airy_square_check,
    hamiltonian_kernel,
    mercer_trace,
    sine_kernel,
    tw_gap,
)

# frozen reference values from an independent high-precision evaluation
AIRY_REF = [
    (-19.3, 0.1856416648496524240652, -0.8539018966669043358501),
    (-14.0, -0.2659834827840777983848, 0.4430248770028436411715),
    (-8.1, -0.1429081470935811201822, 0.8562185863286249736325),
    (-6.25, -0.3496120516108905098546, -0.1910862595234171543686),
    (-4.2, 0.08921076323945071795699, -0.7822156078624518974382),
    (-1.0, 0.5355608832923521187995, -0.01016056711664520939505),
    (0.0, 0.3550280538878172392601, -0.2588194037928067984052),
    (0.7, 0.1891624003981500821795, -0.1998511915822804810519),
    (2.0, 0.03492413042327437913532, -0.053090384433653631704),
    (4.4, 0.0004099735863869618427045, -0.0008818920864917674316059),
    (5.3, 0.00005409053101340058967147, -0.0001269601233365967682235),
    (7.8, 8.28296006622689433069e-8, -2.339138699003239538135e-7),
    (9.1, 1.824228253564028040471e-9, -5.552037344385919435328e-9),
    (12.5, 2.396827826078049936282e-14, -8.521346564673856445297e-14),
    (20.0, 1.691672868670540313554e-27, -7.586391625748354960515e-27),
]


class TestAiry:
    def test_value_at_zero(self):
        # 3^(-2/3) / Gamma(2/3)
        assert abs(airy(0.0) - 0.3550280538878172) < 1e-15

    @pytest.mark.parametrize("x,ai,aip", AIRY_REF)
    def test_reference_grid(self, x, ai, aip):
        assert abs(airy(x) - ai) < 1e-12
        assert abs(airy_deriv(x) - aip) < 1e-12

    def test_dense_scan_continuity(self):
        # regime boundaries must not leave jumps
        xs = np.linspace(-20.0, 20.0, 4001)
        vals = airy(xs)
        assert np.all(np.isfinite(vals))
        jumps = np.abs(np.diff(vals))
        assert jumps.max() < 0.02

    def test_defining_ode(self):
        h = 1e-3
        for x in (1.3, -2.7, 5.0, -7.9):
            second = (
                -airy(x + 2 * h) + 16 * airy(x + h) - 30 * airy(x) + 16 * airy(x - h) - airy(x - 2 * h)
            ) / (12 * h * h)
            assert abs(second - x * airy(x)) < 1e-8

    def test_leading_asymptotic_scale(self):
        x = 10.0
        zeta = (2.0 / 3.0) * x**1.5
        leading = np.exp(-zeta) / (2 * np.sqrt(np.pi) * x**0.25)
        assert abs(airy(x) / leading - 1.0) < 0.01

    def test_guard_for_deep_negative(self):
        with pytest.raises(ValueError):
            airy(-250.0)

    def test_large_positive_underflows_cleanly(self):
        assert airy(500.0) == 0.0


class TestAiryKernel:
    def test_symmetry(self):
        assert abs(airy_kernel(0.3, 1.1) - airy_kernel(1.1, 0.3)) < 1e-15

    def test_near_diagonal_consistency(self):
        x = 0.4
        assert abs(airy_kernel(x, x + 1e-6) - airy_kernel(x, x)) < 1e-6

    def test_diagonal_formula(self):
        x = -1.2
        expect = airy_deriv(x) ** 2 - x * airy(x) ** 2
        assert abs(airy_kernel(x, x) - expect) < 1e-14

    def test_spectral_shift(self):
        # K_lam(x, y) = K_0(x - lam, y - lam)
        assert abs(airy_kernel(0.5, 1.5, 0.7) - airy_kernel(-0.2, 0.8, 0.0)) < 1e-14


class TestAirySquare:
    def test_origin(self):
        k, q = airy_square_check(0.0, 0.0, 0.0)
        assert abs(k - q) < 1e-8

    def test_off_diagonal(self):
        k, q = airy_square_check(1.0, 2.0, 0.0)
        assert abs(k - q) < 1e-8

    def test_grid_sup_error(self):
        worst = 0.0
        for x in np.linspace(-2.0, 2.0, 5):
            for y in np.linspace(-2.0, 2.0, 5):
                k, q = airy_square_check(x, y, 0.0, n_nodes=400)
                worst = max(worst, abs(k - q))
        assert worst < 1e-8

    def test_too_few_nodes_rejected(self):
        with pytest.raises(ValueError):
            airy_square_check(0.0, 0.0, 0.0, n_nodes=50)


class TestSineKernel:
    def test_diagonal(self):
        assert abs(sine_kernel(0.7, 0.7) - 1.0 / np.pi) < 1e-15

    def test_symmetry(self):
        assert abs(sine_kernel(0.2, 1.9) - sine_kernel(1.9, 0.2)) < 1e-15

    def test_zero_potential_spectral_kernel(self):
        # plane-wave solutions of the trivial flow reproduce a multiple of
        # the sine kernel in the spectral variables
        x = 1.7
        psi = lambda k: np.array([np.cos(k * x), 1j * np.sin(k * x)])
        J = np.array([[0.0, -1.0], [1.0, 0.0]])
        ks = np.linspace(-2.0, 2.0, 9)
        for ka in ks:
            for kb in ks:
                if abs(ka - kb) < 1e-9:
                    continue
                num = np.dot(J @ psi(ka), psi(kb))
                val = (num / (1j * (ka - kb))).real
                expect = -np.pi * x * sine_kernel(ka * x, kb * x)
                assert abs(val - expect) < 1e-10


class TestHamiltonianKernel:
    @staticmethod
    def airy_system(lam=0.0):
        psi = lambda x: np.array([airy(x - lam), airy_deriv(x - lam)])
        E = lambda x: np.array([[1.0, 0.0], [0.0, 0.0]])
        F = lambda x: np.array([[-x, 0.0], [0.0, 1.0]])
        return HamiltonianKernel(psi=psi, E=E, F=F, lam=lam, m=1)

    def test_reproduces_airy_kernel(self):
        hk = self.airy_system(0.0)
        for x, y in ((0.2, 1.1), (-0.5, 0.7), (1.0, 2.0)):
            assert abs(hamiltonian_kernel(hk, x, y) - airy_kernel(x, y)) < 1e-8

    def test_diagonal_finite(self):
        hk = self.airy_system(0.3)
        val = hamiltonian_kernel(hk, 0.8, 0.8)
        expect = airy_kernel(0.8, 0.8, 0.3)
        assert abs(val - expect) < 1e-12

    def test_constant_vector_gives_zero(self):
        hk = HamiltonianKernel(
            psi=lambda x: np.array([1.0, 2.0]),
            E=lambda x: np.zeros((2, 2)),
            F=lambda x: np.zeros((2, 2)),
        )
        assert hamiltonian_kernel(hk, 0.3, 0.9) == 0.0

    def test_symmetry_for_real_psi(self):
        hk = self.airy_system(0.0)
        assert abs(hamiltonian_kernel(hk, 0.4, 1.3) - hamiltonian_kernel(hk, 1.3, 0.4)) < 1e-14

    def test_asymmetric_coefficient_rejected(self):
        hk = HamiltonianKernel(
            psi=lambda x: np.array([airy(x), airy_deriv(x)]),
            E=lambda x: np.array([[0.0, 1.0], [0.0, 0.0]]),
            F=lambda x: np.zeros((2, 2)),
        )
        with pytest.raises(ValueError, match="symmetric"):
            hamiltonian_kernel(hk, 0.5, 0.5)


class TestMercerTrace:
    def test_rank_one_exponential(self):
        eig_sum, integral = mercer_trace(lambda s, t: np.exp(-s - t), (0.0, np.inf), 200)
        assert abs(eig_sum - 0.5) < 1e-10
        assert abs(integral - 0.5) < 1e-10

    def test_airy_kernel_halfline(self):
        eig_sum, integral = mercer_trace(airy_kernel, (0.0, np.inf), 200)
        assert abs(eig_sum - integral) < 1e-6

    def test_sine_kernel_unit_interval(self):
        eig_sum, integral = mercer_trace(sine_kernel, (0.0, 1.0), 200)
        assert abs(integral - 1.0 / np.pi) < 1e-12
        assert abs(eig_sum - integral) < 1e-6

    def test_non_psd_rejected(self):
        with pytest.raises(ArithmeticError, match="positive"):
            mercer_trace(lambda s, t: -np.exp(-s - t), (0.0, 2.0), 60)


class TestTWGap:
    def test_far_right_limit(self):
        assert abs(tw_gap(6.0, 120) - 1.0) < 1e-6

    def test_monotone_in_s(self):
        vals = [tw_gap(s, 120, check=False) for s in np.linspace(-4.0, 2.0, 7)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v <= 1.0 + 1e-12 for v in vals)

    def test_resolution_agreement(self):
        a = tw_gap(-2.0, 120, check=False)
        b = tw_gap(-2.0, 240, check=False)
        assert abs(a - b) < 1e-8

    def test_route_agreement(self):
        for s in (-4.0, 0.0):
            a = tw_gap(s, 240, route="direct", check=False)
            b = tw_gap(s, 240, route="hankel", check=False)
            assert abs(a - b) < 1e-8

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            tw_gap(-9.0, 120)
        with pytest.raises(ValueError):
            tw_gap(0.0, 50)
