"""Integrable flows on scattering data and zero-curvature verification.

Reflectionless KdV evolution acts on the norming constants only:
c_j^2 -> c_j^2 exp(-2 kappa_j^3 t), with the decay rates kappa_j invariant.
Lax-pair fields verify the compatibility condition
dV/dt - dZ/dx + [V, Z] = 0 by central differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from detfield.glsolver import GLSolution, potential_q
from detfield.realization import ScatteringData, realize_from_bound_states


def kdv_evolve(data: ScatteringData, t) -> ScatteringData:
    """Evolve reflectionless scattering data for time t under the KdV flow."""
    t = float(t)
    states = tuple((k, c * np.exp(-k ** 3 * t)) for k, c in data.bound_states)
    return ScatteringData(bound_states=states)


def kdv_potential(data: ScatteringData, x, t, lam=1.0) -> float:
    """Potential u(x, t) recovered from the evolved scattering data."""
    sys = realize_from_bound_states(kdv_evolve(data, t))
    sol = GLSolution(sys=sys, lam=lam, kind="scalar")
    return potential_q(sol, x, method="analytic")


def kdv_pde_residual(data: ScatteringData, x, t, h_x=1e-2, h_t=1e-3, lam=1.0) -> float:
    """Defect |4 u_t - u_xxx + 6 u u_x| of the recovered potential."""
    x, t, h_x, h_t = float(x), float(t), float(h_x), float(h_t)
    u = lambda a, b: kdv_potential(data, a, b, lam=lam)
    u_t = (u(x, t + h_t) - u(x, t - h_t)) / (2 * h_t)
    u_x = (u(x + h_x, t) - u(x - h_x, t)) / (2 * h_x)
    u_xxx = (u(x + 2 * h_x, t) - 2 * u(x + h_x, t) + 2 * u(x - h_x, t) - u(x - 2 * h_x, t)) / (
        2 * h_x ** 3
    )
    return float(abs(4 * u_t - u_xxx + 6 * u(x, t) * u_x))


@dataclass(frozen=True)
class LaxPairField:
    """Potential plus the 2x2 matrix pair of its zero-curvature representation."""

    kind: str
    u: callable
    x_matrix: callable  # (x, t, z) -> 2x2
    t_matrix: callable  # (x, t, z) -> 2x2

    def __post_init__(self):
        if self.kind not in ("kdv", "nls"):
            raise ValueError(f"kind must be 'kdv' or 'nls', got {self.kind!r}")


def kdv_lax_field(v, v_x=None, v_xx=None, h=1e-5) -> LaxPairField:
    """Lax pair of the KdV flow from a field v of the modified equation.

    The physical potential is u = v_x + v^2 (Miura).  Spatial derivatives of
    v default to central differences with step h when not supplied.
    """
    if v_x is None:
        v_x = lambda x, t: (v(x + h, t) - v(x - h, t)) / (2 * h)
    if v_xx is None:
        v_xx = lambda x, t: (v(x + h, t) - 2 * v(x, t) + v(x - h, t)) / (h * h)

    def x_matrix(x, t, z):
        vv = v(x, t)
        return np.array([[vv, z], [z, -vv]], dtype=complex)

    def t_matrix(x, t, z):
        vv = v(x, t)
        al = 0.25 * v_xx(x, t) - 0.5 * vv ** 3
        be = -0.5 * (v_x(x, t) + vv ** 2)
        ga = 0.5 * (v_x(x, t) - vv ** 2)
        de = vv
        z2, z3 = z * z, z * z * z
        return np.array(
            [[al + de * z2, be * z + z3], [ga * z + z3, -al - de * z2]], dtype=complex
        )

    u = lambda x, t: v_x(x, t) + v(x, t) ** 2
    return LaxPairField(kind="kdv", u=u, x_matrix=x_matrix, t_matrix=t_matrix)


def nls_lax_field(u, u_x=None, h=1e-5) -> LaxPairField:
    """Lax pair of the cubic NLS flow for a complex potential u."""
    if u_x is None:
        u_x = lambda x, t: (u(x + h, t) - u(x - h, t)) / (2 * h)

    def x_matrix(x, t, z):
        uu = u(x, t)
        return np.array([[-1j * z, uu], [-np.conj(uu), 1j * z]], dtype=complex)

    def t_matrix(x, t, z):
        uu = u(x, t)
        ux = u_x(x, t)
        mod2 = abs(uu) ** 2
        return np.array(
            [
                [-1j * mod2 + 2j * z * z, -1j * ux - 2 * uu * z],
                [-1j * np.conj(ux) + 2 * np.conj(uu) * z, 1j * mod2 - 2j * z * z],
            ],
            dtype=complex,
        )

    return LaxPairField(kind="nls", u=u, x_matrix=x_matrix, t_matrix=t_matrix)


def mkdv_kink_field(k=1.0, x0=0.0) -> LaxPairField:
    """Exact traveling kink of the modified KdV flow, wired into its Lax pair.

    v(x, t) = k tanh(k (x - x0 - k^2 t / 2)); its Miura image is the
    constant k^2.
    """
    k, x0 = float(k), float(x0)

    def theta(x, t):
        return k * (x - x0 - k * k * t / 2.0)

    v = lambda x, t: k * np.tanh(theta(x, t))
    v_x = lambda x, t: k * k / np.cosh(theta(x, t)) ** 2
    v_xx = lambda x, t: -2 * k ** 3 * np.tanh(theta(x, t)) / np.cosh(theta(x, t)) ** 2
    return kdv_lax_field(v, v_x=v_x, v_xx=v_xx)


def nls_bright_soliton_field(a=1.0) -> LaxPairField:
    """Exact bright soliton a sech(a x) exp(-i a^2 t) of the cubic NLS flow."""
    a = float(a)
    u = lambda x, t: a / np.cosh(a * x) * np.exp(-1j * a * a * t)
    u_x = lambda x, t: -a * a * np.sinh(a * x) / np.cosh(a * x) ** 2 * np.exp(-1j * a * a * t)
    return nls_lax_field(u, u_x=u_x)


def zero_curvature_residual(field: LaxPairField, x, t, z, h=1e-3) -> float:
    """Frobenius norm of dV/dt - dZ/dx + [V, Z] at (x, t, z)."""
    x, t, z, h = float(x), float(t), complex(z), float(h)
    V = field.x_matrix
    Z = field.t_matrix
    Vm = np.asarray(V(x, t, z), dtype=complex)
    Zm = np.asarray(Z(x, t, z), dtype=complex)
    if Vm.shape != (2, 2) or Zm.shape != (2, 2):
        raise ValueError("Lax matrices must be 2x2")
    if abs(np.trace(Zm)) > 1e-10 * max(1.0, np.abs(Zm).max()):
        raise ValueError("t-matrix must be traceless")
    dVdt = (np.asarray(V(x, t + h, z)) - np.asarray(V(x, t - h, z))) / (2 * h)
    dZdx = (np.asarray(Z(x + h, t, z)) - np.asarray(Z(x - h, t, z))) / (2 * h)
    return float(np.linalg.norm(dVdt - dZdx + Vm @ Zm - Zm @ Vm))


def derivative_kernel_rank(k_grid, psi, which, coeffs=None, threshold=1e-8) -> int:
    """Numerical rank of a sampled derivative kernel of the spectral family.

    psi holds the 2-vectors Psi(k) sampled on k_grid (shape (len(k_grid), 2)).
    which "x" builds the signature-sandwich kernel of the spatial derivative;
    which "t" builds the time-derivative kernel, whose matrix entries are
    polynomials of degree two in each spectral variable and need the scalar
    coefficients coeffs = (beta, gamma, delta) of the flow at the sample
    point.  Rank counts singular values above threshold * sigma_max.
    """
    k_grid = np.asarray(k_grid, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    if k_grid.size < 4:
        raise ValueError("need at least 4 spectral grid points")
    if psi.shape != (k_grid.size, 2):
        raise ValueError(f"psi must have shape ({k_grid.size}, 2)")
    p1, p2 = psi[:, 0], psi[:, 1]
    if which == "x":
        kernel = np.outer(p1, p1) - np.outer(p2, p2)
    elif which == "t":
        if coeffs is None:
            raise ValueError("which='t' needs coeffs = (beta, gamma, delta)")
        beta, gamma, delta = (complex(c) for c in coeffs)
        kk = np.add.outer(k_grid ** 2, k_grid ** 2) + np.outer(k_grid, k_grid)
        ks = np.add.outer(k_grid, k_grid)
        m11 = -gamma + kk
        m12 = 1j * delta * ks
        m22 = beta - kk
        kernel = (
            m11 * np.outer(p1, p1)
            + m12 * np.outer(p2, p1)
            + m12 * np.outer(p1, p2)
            + m22 * np.outer(p2, p2)
        )
    else:
        raise ValueError(f"which must be 'x' or 't', got {which!r}")
    sigma = np.linalg.svd(kernel, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.sum(sigma > threshold * sigma[0]))
