"""Observability and controllability Gramians with Lyapunov residual checks.

Q_x = int_x^inf exp(-tA^dag) C^dag C exp(-tA) dt   (observability)
L_x = int_x^inf exp(-tA) B B^dag exp(-tA^dag) dt   (controllability)
R_x = int_x^inf exp(-yA) B C exp(-yA) dy           (Hankel product)

The closed forms extend to negative x since the state dimension is finite
and all eigenvalues of A lie in the open right half-plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from detfield import _quad
from detfield.realization import EIG_COND_LIMIT, StateSpaceSystem, _eig, _expmA, phi


@dataclass(frozen=True)
class GramianBundle:
    """The three tail integrals of a system at a spatial point x."""

    x: float
    Q: np.ndarray
    L: np.ndarray
    R: np.ndarray


def _check_decay(sys):
    eigs = np.linalg.eigvals(sys.A)
    if np.any(eigs.real <= 0):
        raise ValueError("divergent Gramian integral: A has an eigenvalue with Re <= 0")


def _denominator(u, v):
    # pairwise kappa_i + kappa_j; systems guarantee positive real parts
    return np.add.outer(u, v)


def obs_gramian(sys: StateSpaceSystem, x, method="auto") -> np.ndarray:
    """Observability Gramian Q_x.

    method:
      "auto"       eigenbasis closed form, falling back to quadrature when
                   the eigenvector matrix is ill conditioned
      "eig"        force the closed form
      "sylvester"  solve A^dag Q + Q A = exp(-xA^dag) C^dag C exp(-xA)
      "quadrature" integrate the defining integral numerically
    """
    _check_decay(sys)
    x = float(x)
    eig = _eig(sys)
    if method == "auto":
        method = "eig" if eig.usable else "quadrature"
    if method == "eig":
        if not eig.usable:
            raise ValueError(f"eigenvector matrix condition {eig.cond:.2e} exceeds {EIG_COND_LIMIT:.0e}")
        kb = np.add.outer(eig.kappas.conj(), eig.kappas)
        K = np.multiply.outer(eig.CV.conj(), eig.CV) * np.exp(-x * kb) / kb
        return eig.Vinv.conj().T @ K @ eig.Vinv
    if method == "sylvester":
        E = _expmA(sys, x)
        rhs = (sys.C @ E).conj().T @ (sys.C @ E)
        return scipy.linalg.solve_sylvester(sys.A.conj().T, sys.A, rhs)
    if method == "quadrature":
        return _integrate_gramian(sys, x, kind="Q")
    raise ValueError(f"unknown method {method!r}")


def ctrl_gramian(sys: StateSpaceSystem, x, method="auto") -> np.ndarray:
    """Controllability Gramian L_x (as obs_gramian with B in place of C^dag)."""
    _check_decay(sys)
    x = float(x)
    eig = _eig(sys)
    if method == "auto":
        method = "eig" if eig.usable else "quadrature"
    if method == "eig":
        if not eig.usable:
            raise ValueError(f"eigenvector matrix condition {eig.cond:.2e} exceeds {EIG_COND_LIMIT:.0e}")
        kb = np.add.outer(eig.kappas, eig.kappas.conj())
        K = np.multiply.outer(eig.VinvB, eig.VinvB.conj()) * np.exp(-x * kb) / kb
        return eig.V @ K @ eig.V.conj().T
    if method == "sylvester":
        E = _expmA(sys, x)
        rhs = (E @ sys.B) @ (E @ sys.B).conj().T
        return scipy.linalg.solve_sylvester(sys.A, sys.A.conj().T, rhs)
    if method == "quadrature":
        return _integrate_gramian(sys, x, kind="L")
    raise ValueError(f"unknown method {method!r}")


def hankel_product_R(sys: StateSpaceSystem, x, method="auto") -> np.ndarray:
    """Product operator R_x = int_x^inf exp(-yA) B C exp(-yA) dy."""
    _check_decay(sys)
    x = float(x)
    eig = _eig(sys)
    if method == "auto":
        method = "eig" if eig.usable else "quadrature"
    if method == "eig":
        if not eig.usable:
            raise ValueError(f"eigenvector matrix condition {eig.cond:.2e} exceeds {EIG_COND_LIMIT:.0e}")
        kb = np.add.outer(eig.kappas, eig.kappas)
        K = np.multiply.outer(eig.VinvB, eig.CV) * np.exp(-x * kb) / kb
        return eig.V @ K @ eig.Vinv
    if method == "sylvester":
        E = _expmA(sys, x)
        rhs = (E @ sys.B) @ (sys.C @ E)
        return scipy.linalg.solve_sylvester(sys.A, sys.A, rhs)
    if method == "quadrature":
        return _integrate_gramian(sys, x, kind="R")
    raise ValueError(f"unknown method {method!r}")


def _integrate_gramian(sys, x, kind, n_nodes=400):
    """Gauss-Legendre integration of the defining integral on (x, x + L)."""
    kmin = np.linalg.eigvals(sys.A).real.min()
    L = max(40.0 / kmin, 20.0)
    nodes, weights = _quad.gauss_legendre(x, x + L, n_nodes)
    acc = np.zeros((sys.n, sys.n), dtype=complex)
    for t, w in zip(nodes, weights):
        E = _expmA(sys, t)
        if kind == "Q":
            row = sys.C @ E
            acc += w * (row.conj().T @ row)
        elif kind == "L":
            col = E @ sys.B
            acc += w * (col @ col.conj().T)
        else:
            acc += w * ((E @ sys.B) @ (sys.C @ E))
    return acc


def gramian_bundle(sys: StateSpaceSystem, x) -> GramianBundle:
    """Q_x, L_x and R_x collected at one spatial point."""
    return GramianBundle(
        x=float(x),
        Q=obs_gramian(sys, x),
        L=ctrl_gramian(sys, x),
        R=hankel_product_R(sys, x),
    )


def lyapunov_residual(sys: StateSpaceSystem, x, Q=None, L=None) -> float:
    """Frobenius-norm defect of the two Lyapunov equations at x.

    A^dag Q_x + Q_x A = exp(-xA^dag) C^dag C exp(-xA)
    A L_x + L_x A^dag = exp(-xA) B B^dag exp(-xA^dag)

    Q and L may be supplied to measure the residual of perturbed Gramians.
    """
    x = float(x)
    if Q is None:
        Q = obs_gramian(sys, x)
    if L is None:
        L = ctrl_gramian(sys, x)
    E = _expmA(sys, x)
    row = sys.C @ E
    col = E @ sys.B
    rq = sys.A.conj().T @ Q + Q @ sys.A - row.conj().T @ row
    rl = sys.A @ L + L @ sys.A.conj().T - col @ col.conj().T
    return float(max(np.linalg.norm(rq), np.linalg.norm(rl)))


def trace_derivative_check(sys: StateSpaceSystem, x, h=1e-5):
    """Pair (central difference of trace Q_x, closed form -phi(2x)).

    The closed form matches the derivative when A = A^dag and C = B^dag;
    the caller asserts closeness under that hypothesis.
    """
    x, h = float(x), float(h)
    fd = (np.trace(obs_gramian(sys, x + h)) - np.trace(obs_gramian(sys, x - h))).real / (2 * h)
    return float(fd), float(-phi(sys, 2 * x).real)


def plancherel_trace_check(sys: StateSpaceSystem, n_nodes=800, tail_tol=1e-9):
    """Pair (trace Q_0, frequency integral of the resolvent norm).

    The integral (1/2pi) int ||C (iy I + A)^{-1}||_F^2 dy is evaluated on a
    truncated symmetric interval through the substitution y = s tan(theta);
    the truncation point is chosen so the analytic tail bound stays below
    tail_tol.  Raises when no admissible truncation exists.
    """
    normA = float(np.linalg.norm(sys.A, 2))
    normC2 = float(np.linalg.norm(sys.C) ** 2)
    # tail beyond Y: (1/pi) * ||C||_F^2 / (Y - ||A||)
    Y = normA + normC2 / (np.pi * tail_tol)
    if not np.isfinite(Y):
        raise ValueError("quadrature non-convergence: tail estimate exceeds tolerance")
    s = max(normA, 1.0)
    theta_max = np.arctan(Y / s)
    nodes, weights = _quad.gauss_legendre(-theta_max, theta_max, n_nodes)
    total = 0.0
    eye = np.eye(sys.n)
    for th, w in zip(nodes, weights):
        y = s * np.tan(th)
        jac = s / np.cos(th) ** 2
        res = np.linalg.solve(1j * y * eye + sys.A, sys.C.conj().T)
        total += w * jac * float(np.linalg.norm(res) ** 2)
    integral = total / (2 * np.pi)
    traceQ0 = float(np.trace(obs_gramian(sys, 0.0)).real)
    return traceQ0, float(integral)
