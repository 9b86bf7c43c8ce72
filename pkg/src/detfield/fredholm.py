"""Fredholm determinants: exact finite-dimensional identities and a Nystrom oracle.

The finite-rank structure of the kernels makes every operator determinant
equal to an n x n matrix determinant (n = state dimension); the Nystrom
route discretizes the integral operator on a quadrature grid and provides
an independent check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from detfield import _quad
from detfield.gramian import ctrl_gramian, hankel_product_R, obs_gramian
from detfield.realization import StateSpaceSystem, _eig, _expmA


class HypothesisError(ValueError):
    """A norm or positivity hypothesis required by an identity fails."""


@dataclass(frozen=True)
class DiscretizedKernel:
    """Quadrature rule plus symmetrically weighted kernel matrix.

    matrix[i, j] = sqrt(w_i) k(t_i, t_j) sqrt(w_j), so determinants and
    spectra of the integral operator can be read off the matrix.
    """

    nodes: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    scheme: str
    truncation_bound: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.size < 1 or np.any(weights <= 0) or np.any(np.diff(nodes) <= 0):
            raise ValueError("need at least one node, positive weights, strictly increasing nodes")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))


def _kappa_min(sys):
    return float(np.linalg.eigvals(sys.A).real.min())


def default_length(sys) -> float:
    """Truncation length for kernels decaying like exp(-2 kappa_min t)."""
    return max(20.0 / _kappa_min(sys), 10.0)


def _rows_C_exp(sys, ts):
    """Stack of row vectors C exp(-t A) for t in ts."""
    eig = _eig(sys)
    if eig.usable:
        return np.exp(-np.multiply.outer(ts, eig.kappas)) * eig.CV @ eig.Vinv
    return np.vstack([sys.C @ _expmA(sys, t) for t in ts])


def _cols_exp_B(sys, ts):
    """Stack of column vectors exp(-t A) B (as rows of a matrix)."""
    eig = _eig(sys)
    if eig.usable:
        return (np.exp(-np.multiply.outer(ts, eig.kappas)) * eig.VinvB) @ eig.V.T
    return np.vstack([(_expmA(sys, t) @ sys.B).ravel() for t in ts])


def nystrom_hankel(sys: StateSpaceSystem, x, n_nodes=200, length=None, scheme="legendre") -> DiscretizedKernel:
    """Discretize the Hankel operator with kernel phi(2x + s + t) on (0, inf).

    scheme "legendre" truncates to (0, L) with mapped Gauss-Legendre nodes
    (L defaulting to the decay-based length); "laguerre" keeps the half line
    with the exponential weight folded into the quadrature weights.
    """
    if n_nodes < 8:
        raise ValueError("need at least 8 quadrature nodes")
    x = float(x)
    kmin = _kappa_min(sys)
    if scheme == "legendre":
        L = float(length) if length is not None else default_length(sys)
        tb = float(np.exp(-2.0 * kmin * L))
        if tb >= 1e-14:
            warnings.warn(
                f"truncation bound exp(-2 kappa_min L) = {tb:.2e} exceeds 1e-14",
                stacklevel=2,
            )
        nodes, weights = _quad.gauss_legendre(0.0, L, n_nodes)
    elif scheme == "laguerre":
        nodes, weights = _quad.gauss_laguerre_folded(n_nodes, rate=kmin)
        tb = 0.0
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    # phi(2x + s + t) = [C exp(-(x+s)A)] [exp(-(x+t)A) B]: exact low-rank split
    F = _rows_C_exp(sys, x + nodes)
    G = _cols_exp_B(sys, x + nodes)
    sq = np.sqrt(weights)
    M = (sq[:, None] * F) @ (G * sq[:, None]).T
    return DiscretizedKernel(nodes=nodes, weights=weights, matrix=M, scheme=scheme, truncation_bound=tb)


def nystrom_obs(sys: StateSpaceSystem, x, n_nodes=200, length=None) -> DiscretizedKernel:
    """Discretize the kernel C exp(-sA) exp(-tA^dag) C^dag on (x, x + L).

    This is the integral-operator form of the observability Gramian tail;
    its Fredholm determinant matches det over Q_x.
    """
    if n_nodes < 8:
        raise ValueError("need at least 8 quadrature nodes")
    x = float(x)
    L = float(length) if length is not None else default_length(sys)
    tb = float(np.exp(-2.0 * _kappa_min(sys) * L))
    nodes, weights = _quad.gauss_legendre(x, x + L, n_nodes)
    E = _rows_C_exp(sys, nodes)
    sq = np.sqrt(weights)
    W = sq[:, None] * E
    M = W @ W.conj().T
    return DiscretizedKernel(nodes=nodes, weights=weights, matrix=M, scheme="legendre", truncation_bound=tb)


def det_shifted(M, z, method="lu") -> complex:
    """det(I + (z - 1) M) for a square matrix M.

    method "lu" evaluates by LU with partial pivoting; "eig" requires a
    Hermitian M and multiplies the shifted eigenvalues.
    """
    M = np.asarray(M, dtype=complex)
    z = complex(z)
    n = M.shape[0]
    if method == "lu":
        return complex(np.linalg.det(np.eye(n) + (z - 1.0) * M))
    if method == "eig":
        if np.abs(M - M.conj().T).max() > 1e-10 * max(1.0, np.abs(M).max()):
            raise ValueError("eigenvalue path requires a Hermitian matrix")
        lam = np.linalg.eigvalsh(M)
        return complex(np.prod(1.0 + (z - 1.0) * lam))
    raise ValueError(f"unknown method {method!r}")


def log_det_shifted(M, z) -> complex:
    """Principal-branch log det(I + (z-1) M) as a sum over eigenvalues.

    Raises when a factor falls on the closed negative real axis, where the
    principal branch is ambiguous.
    """
    M = np.asarray(M, dtype=complex)
    lam = np.linalg.eigvals(M)
    factors = 1.0 + (complex(z) - 1.0) * lam
    scale = max(1.0, float(np.abs(factors).max()))
    bad = (factors.real <= 0) & (np.abs(factors.imag) <= 1e-14 * scale)
    if np.any(bad):
        raise ValueError("branch ambiguity: a determinant factor lies on the negative real axis")
    return complex(np.sum(np.log(factors)))


def det_gap(sys: StateSpaceSystem, x) -> float:
    """Gap determinant F(x) = det(I - Q_x), a probability in (0, 1]."""
    Q = obs_gramian(sys, x)
    norm = float(np.linalg.norm(Q, 2))
    if norm >= 1.0:
        raise HypothesisError(f"operator norm of Q_x is {norm:.6g} >= 1 at x={float(x):.6g}")
    val = np.linalg.det(np.eye(sys.n) - Q)
    return float(val.real)


def det_hankel_via_R(sys: StateSpaceSystem, x, lam) -> complex:
    """det(I - lam R_x), the Fredholm determinant of the shifted Hankel operator."""
    R = hankel_product_R(sys, x)
    return complex(np.linalg.det(np.eye(sys.n) - complex(lam) * R))


def det_square(sys: StateSpaceSystem, x, lam) -> complex:
    """det(I - lam^2 Gamma^2) evaluated as det(I - lam R_x) det(I + lam R_x)."""
    lam = complex(lam)
    return det_hankel_via_R(sys, x, lam) * det_hankel_via_R(sys, x, -lam)


def det_zs(sys: StateSpaceSystem, x, z) -> complex:
    """det(I + (z - 1) L_x Q_x), the Zakharov-Shabat generating determinant."""
    Q = obs_gramian(sys, x)
    L = ctrl_gramian(sys, x)
    return complex(np.linalg.det(np.eye(sys.n) + (complex(z) - 1.0) * (L @ Q)))


def conjugation_invariance_check(sys: StateSpaceSystem, U, lam):
    """Pair det(I + lam Q_0) and det(I + lam U Q_0 U^dag) for unitary U.

    Unitary conjugation of the Gramian leaves the determinant invariant;
    the caller asserts equality of the two values.
    """
    U = np.asarray(U, dtype=complex)
    if U.shape != (sys.n, sys.n):
        raise ValueError(f"U must be {sys.n} x {sys.n}")
    if np.abs(U.conj().T @ U - np.eye(sys.n)).max() > 1e-12:
        raise ValueError("U is not unitary to within 1e-12")
    lam = complex(lam)
    Q = obs_gramian(sys, 0.0)
    eye = np.eye(sys.n)
    d0 = complex(np.linalg.det(eye + lam * Q))
    d1 = complex(np.linalg.det(eye + lam * (U @ Q @ U.conj().T)))
    return d0, d1
