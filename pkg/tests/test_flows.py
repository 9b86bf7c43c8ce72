import numpy as np
import pytest
import scipy.integrate
import scipy.optimize

from detfield.flows import (
    derivative_kernel_rank,
    kdv_evolve,
    kdv_lax_field,
    kdv_pde_residual,
    kdv_potential,
    mkdv_kink_field,
    nls_bright_soliton_field,
    nls_lax_field,
    zero_curvature_residual,
)
from detfield.realization import ScatteringData

ONE = ScatteringData(bound_states=((1.0, np.sqrt(2.0)),))
TWO = ScatteringData(bound_states=((1.0, 1.2), (1.5, 1.0)))


class TestEvolve:
    def test_time_zero_identity(self):
        out = kdv_evolve(TWO, 0.0)
        assert out.bound_states == TWO.bound_states

    def test_squared_norming_carries_double_exponent(self):
        # c^2 = 2 at kappa = 1 evolves to 2 exp(-2t)
        data = ScatteringData(bound_states=((1.0, np.sqrt(2.0)),))
        out = kdv_evolve(data, 1.0)
        assert abs(out.norming[0] ** 2 - 2.0 * np.exp(-2.0)) < 1e-14

    def test_kappas_invariant(self):
        out = kdv_evolve(TWO, 0.7)
        assert np.allclose(out.kappas, TWO.kappas)

    def test_group_law(self):
        a = kdv_evolve(kdv_evolve(TWO, 0.3), 0.45)
        b = kdv_evolve(TWO, 0.75)
        assert np.abs(a.norming - b.norming).max() < 1e-14


class TestKdVPotential:
    def test_initial_time_matches_recovery(self):
        for x in (-0.5, 0.0, 1.0):
            assert abs(kdv_potential(ONE, x, 0.0) - (-2.0 / np.cosh(x) ** 2)) < 1e-7

    def test_rigid_translate(self):
        # the evolved soliton is the initial profile translated; the shift is
        # fitted rather than assumed, keeping the check normalization-free
        t = 0.4
        xs = np.linspace(-1.0, 3.0, 41)
        u0 = lambda x: kdv_potential(ONE, x, 0.0)
        ut = np.array([kdv_potential(ONE, x, t) for x in xs])

        def sup_err(delta):
            return max(abs(ut[i] - u0(x - delta)) for i, x in enumerate(xs))

        res = scipy.optimize.minimize_scalar(sup_err, bounds=(-3.0, 3.0), method="bounded",
                                             options={"xatol": 1e-12})
        assert res.fun < 1e-6

    def test_far_field_decay(self):
        assert abs(kdv_potential(TWO, 30.0, 0.1)) < 1e-9
        assert abs(kdv_potential(TWO, -30.0, 0.1)) < 1e-9


class TestKdVResidual:
    def test_single_soliton_point(self):
        assert kdv_pde_residual(ONE, 0.5, 0.1) < 1e-3

    def test_two_soliton_grid(self):
        worst = max(
            kdv_pde_residual(TWO, x, t)
            for x in np.linspace(-1.0, 2.0, 7)
            for t in (0.05, 0.15)
        )
        assert worst < 1e-2

    def test_empty_potential(self):
        # a vanishing norming constant approximates the zero potential
        tiny = ScatteringData(bound_states=((1.0, 1e-8),))
        assert kdv_pde_residual(tiny, 0.3, 0.1) < 1e-9


class TestZeroCurvature:
    def test_kink_satisfies_mkdv(self):
        # validate the field against its flow equation before using it
        field = mkdv_kink_field(k=1.3)
        k = 1.3
        v = lambda x, t: k * np.tanh(k * (x - k * k * t / 2.0))
        h = 1e-4
        for x, t in ((0.37, 0.21), (-0.8, 0.5)):
            vt = (v(x, t + h) - v(x, t - h)) / (2 * h)
            vx = (v(x + h, t) - v(x - h, t)) / (2 * h)
            vxxx = (v(x + 2 * h, t) - 2 * v(x + h, t) + 2 * v(x - h, t) - v(x - 2 * h, t)) / (2 * h**3)
            assert abs(4 * vt - vxxx + 6 * v(x, t) ** 2 * vx) < 1e-4
        assert abs(field.u(0.3, 0.1) - k * k) < 1e-9  # Miura image of the kink

    def test_kink_zero_curvature(self):
        field = mkdv_kink_field(k=1.2)
        for x, t, z in ((0.3, 0.2, 0.5), (-0.6, 0.4, 0.8 + 0.3j), (1.1, -0.3, 1.2)):
            assert zero_curvature_residual(field, x, t, z) < 1e-4

    def test_nls_soliton_satisfies_equation(self):
        # i u_t = u_xx + 2 |u|^2 u checked numerically before the pair test
        field = nls_bright_soliton_field(a=1.0)
        u = field.u
        h = 1e-4
        for x, t in ((0.4, 0.3), (-0.9, 0.1)):
            ut = (u(x, t + h) - u(x, t - h)) / (2 * h)
            uxx = (u(x + h, t) - 2 * u(x, t) + u(x - h, t)) / h**2
            assert abs(1j * ut - uxx - 2 * abs(u(x, t)) ** 2 * u(x, t)) < 1e-6

    def test_nls_zero_curvature(self):
        field = nls_bright_soliton_field(a=1.0)
        for x, t, z in ((0.2, 0.3, 0.6), (-0.8, 0.1, 0.4 + 0.2j)):
            assert zero_curvature_residual(field, x, t, z) < 1e-4

    def test_zero_potential_exact(self):
        field = kdv_lax_field(lambda x, t: 0.0, v_x=lambda x, t: 0.0, v_xx=lambda x, t: 0.0)
        assert zero_curvature_residual(field, 0.5, 0.2, 0.7) == 0.0

    def test_second_order_step_convergence(self):
        field = mkdv_kink_field(k=1.1)
        x, t, z = 0.4, 0.3, 0.9
        r1 = zero_curvature_residual(field, x, t, z, h=4e-3)
        r2 = zero_curvature_residual(field, x, t, z, h=2e-3)
        order = np.log2(r1 / r2)
        assert order > 1.8

    def test_nonzero_trace_rejected(self):
        field = nls_lax_field(lambda x, t: 1.0 / np.cosh(x))
        bad = kdv_lax_field(lambda x, t: 0.1)
        broken = type(field)(
            kind="nls",
            u=field.u,
            x_matrix=field.x_matrix,
            t_matrix=lambda x, t, z: np.eye(2),
        )
        with pytest.raises(ValueError, match="traceless"):
            zero_curvature_residual(broken, 0.0, 0.0, 1.0)
        del bad


def _spectral_samples(field, x_end, t, ks):
    """Integrate the x-equation of the pair for each spectral point."""
    out = []
    for k in ks:
        z = 1j * k

        def rhs(x, y):
            m = field.x_matrix(x, t, z)
            v = y[:2] + 1j * y[2:]
            dv = m @ v
            return np.concatenate([dv.real, dv.imag])

        y0 = np.array([1.0, 0.5, 0.0, 0.0])
        sol = scipy.integrate.solve_ivp(rhs, (0.0, x_end), y0, rtol=1e-10, atol=1e-12)
        out.append(sol.y[:2, -1] + 1j * sol.y[2:, -1])
    return np.array(out)


class TestDerivativeKernelRank:
    def test_spatial_kernel_rank_two(self):
        field = mkdv_kink_field(k=1.0)
        ks = np.linspace(0.5, 2.5, 12)
        psi = _spectral_samples(field, 1.0, 0.2, ks)
        assert derivative_kernel_rank(ks, psi, "x") <= 2

    def test_time_kernel_rank_six(self):
        field = mkdv_kink_field(k=1.0)
        ks = np.linspace(0.5, 2.5, 12)
        psi = _spectral_samples(field, 1.0, 0.2, ks)
        coeffs = (-0.55, 0.45, 0.95)  # generic flow coefficients at the sample point
        rank = derivative_kernel_rank(ks, psi, "t", coeffs=coeffs)
        assert rank <= 6

    def test_zero_samples_rank_zero(self):
        ks = np.linspace(0.0, 1.0, 5)
        psi = np.zeros((5, 2), dtype=complex)
        assert derivative_kernel_rank(ks, psi, "x") == 0

    def test_too_few_points_rejected(self):
        with pytest.raises(ValueError):
            derivative_kernel_rank([0.0, 1.0], np.zeros((2, 2)), "x")

    def test_time_kernel_needs_coefficients(self):
        ks = np.linspace(0.0, 1.0, 5)
        with pytest.raises(ValueError, match="coeffs"):
            derivative_kernel_rank(ks, np.zeros((5, 2)), "t")
