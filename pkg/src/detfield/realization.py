"""Finite-dimensional linear systems (-A, B, C) and their impulse responses.

A system is a triple of matrices with one-dimensional input and output,
generating the scalar impulse response phi(x) = C exp(-xA) B.  All spectra
of A must lie in the open right half-plane so that exp(-tA) decays.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

MAX_STATE_DIM = 64

# eigendecompositions beyond this condition number are not trusted
EIG_COND_LIMIT = 1e8


def _as_matrix(value, rows, cols, name):
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (rows, cols):
        raise ValueError(f"{name} must have shape ({rows}, {cols}), got {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True, eq=False)
class StateSpaceSystem:
    """Realization (A, B, C) of the impulse response phi(x) = C exp(-xA) B.

    Parameters
    ----------
    A : (n, n) complex array
        State matrix; every eigenvalue must have strictly positive real part.
    B : (n, 1) complex array
        Input map.
    C : (1, n) complex array
        Output map.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        n = A.shape[0]
        if not 1 <= n <= MAX_STATE_DIM:
            raise ValueError(f"state dimension must be in [1, {MAX_STATE_DIM}], got {n}")
        A = _as_matrix(A, n, n, "A")
        B = _as_matrix(self.B, n, 1, "B")
        C = _as_matrix(self.C, 1, n, "C")
        eigs = np.linalg.eigvals(A)
        if np.any(eigs.real <= 0.0):
            raise ValueError(
                "every eigenvalue of A must have strictly positive real part; "
                f"found real parts {np.sort(eigs.real)}"
            )
        for name, arr in (("A", A), ("B", B), ("C", C)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def is_selfadjoint(self, tol=1e-12) -> bool:
        """True when A = A^dagger and C = B^dagger up to tol."""
        scale = max(np.abs(self.A).max(), np.abs(self.B).max(), 1.0)
        return (
            np.abs(self.A - self.A.conj().T).max() <= tol * scale
            and np.abs(self.C - self.B.conj().T).max() <= tol * scale
        )

    def is_real(self, tol=1e-12) -> bool:
        scale = max(np.abs(self.A).max(), np.abs(self.B).max(), np.abs(self.C).max(), 1.0)
        return (
            np.abs(self.A.imag).max() <= tol * scale
            and np.abs(self.B.imag).max() <= tol * scale
            and np.abs(self.C.imag).max() <= tol * scale
        )


@dataclass(frozen=True)
class ScatteringData:
    """Bound-state data (kappa_j, c_j) of a reflectionless potential.

    kappa_j are the decay rates (positive, pairwise distinct) and c_j the
    norming constants (positive).  The associated impulse response is
    phi(x) = sum_j c_j^2 exp(-kappa_j x).
    """

    bound_states: tuple

    def __post_init__(self):
        states = tuple((float(k), float(c)) for k, c in self.bound_states)
        if not states:
            raise ValueError("at least one bound state is required")
        kappas = [k for k, _ in states]
        if any(k <= 0 for k in kappas):
            raise ValueError("decay rates kappa_j must be positive")
        if any(c <= 0 for _, c in states):
            raise ValueError("norming constants c_j must be positive")
        if len(set(kappas)) != len(kappas):
            raise ValueError("decay rates kappa_j must be pairwise distinct")
        object.__setattr__(self, "bound_states", states)

    @property
    def kappas(self) -> np.ndarray:
        return np.array([k for k, _ in self.bound_states])

    @property
    def norming(self) -> np.ndarray:
        return np.array([c for _, c in self.bound_states])


def realize_from_bound_states(data: ScatteringData) -> StateSpaceSystem:
    """Build the self-adjoint balanced realization of reflectionless data.

    A = diag(kappa_1, ..., kappa_n), B = column(c_1, ..., c_n), C = B^dagger,
    so phi(x) = sum_j c_j^2 exp(-kappa_j x).
    """
    kappas = data.kappas
    c = data.norming
    A = np.diag(kappas).astype(complex)
    B = c.astype(complex).reshape(-1, 1)
    return StateSpaceSystem(A=A, B=B, C=B.conj().T)


class _EigData:
    """Cached eigendecomposition of a system's A together with C V, V^-1 B."""

    __slots__ = ("kappas", "V", "Vinv", "CV", "VinvB", "cond", "usable")

    def __init__(self, sys: StateSpaceSystem):
        kappas, V = np.linalg.eig(sys.A)
        cond = np.linalg.cond(V)
        self.kappas = kappas
        self.V = V
        self.cond = cond
        self.usable = bool(cond <= EIG_COND_LIMIT)
        if self.usable:
            self.Vinv = np.linalg.inv(V)
            self.CV = (sys.C @ V).ravel()
            self.VinvB = (self.Vinv @ sys.B).ravel()
        else:
            self.Vinv = None
            self.CV = None
            self.VinvB = None


def _eig(sys: StateSpaceSystem) -> _EigData:
    cached = getattr(sys, "_eig_cache", None)
    if cached is None:
        cached = _EigData(sys)
        object.__setattr__(sys, "_eig_cache", cached)
    return cached


def matrix_exponential(M, t):
    """Evaluate exp(-t M).

    Uses the eigendecomposition of M when it is diagonalizable within
    conditioning bounds, otherwise falls back to scaling-and-squaring with
    a Pade approximant.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"M must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M.view(float))):
        raise ValueError("M contains non-finite entries")
    t = float(t)
    try:
        lam, V = np.linalg.eig(M)
        if np.linalg.cond(V) <= EIG_COND_LIMIT:
            return (V * np.exp(-t * lam)) @ np.linalg.inv(V)
    except np.linalg.LinAlgError:
        pass
    return scipy.linalg.expm(-t * M)


def _expmA(sys: StateSpaceSystem, x):
    """exp(-x A) for the system's state matrix."""
    eig = _eig(sys)
    if eig.usable:
        return (eig.V * np.exp(-x * eig.kappas)) @ eig.Vinv
    return scipy.linalg.expm(-x * sys.A)


def phi(sys: StateSpaceSystem, x) -> complex:
    """Impulse response phi(x) = C exp(-xA) B at a single point.

    The closed form extends to negative x; decay is only guaranteed for
    x >= 0.
    """
    return complex(phi_grid(sys, np.array([float(x)]))[0])


def phi_grid(sys: StateSpaceSystem, xs) -> np.ndarray:
    """Vectorized impulse response over an array of points."""
    xs = np.asarray(xs, dtype=float)
    eig = _eig(sys)
    if eig.usable:
        g = eig.CV * eig.VinvB
        return np.exp(-np.multiply.outer(xs, eig.kappas)) @ g
    out = np.empty(xs.shape, dtype=complex)
    flat = xs.ravel()
    res = out.ravel()
    for i, x in enumerate(flat):
        res[i] = (sys.C @ scipy.linalg.expm(-x * sys.A) @ sys.B)[0, 0]
    return out


def shift(sys: StateSpaceSystem, x) -> StateSpaceSystem:
    """Shifted system (A, exp(-xA) B, C exp(-xA)).

    Its impulse response is phi(2x + t); shifts compose additively.
    """
    E = _expmA(sys, float(x))
    return StateSpaceSystem(A=sys.A, B=E @ sys.B, C=sys.C @ E)


def transfer(sys: StateSpaceSystem, lam) -> complex:
    """Transfer function C (lam I + A)^{-1} B, the Laplace transform of phi."""
    lam = complex(lam)
    M = lam * np.eye(sys.n) + sys.A
    try:
        sol = np.linalg.solve(M, sys.B)
    except np.linalg.LinAlgError:
        raise ValueError(f"transfer function pole: {lam} is an eigenvalue of -A") from None
    resid = np.abs(M @ sol - sys.B).max()
    if not np.isfinite(resid) or resid > 1e-6 * max(1.0, np.abs(sys.B).max()):
        raise ValueError(f"transfer function pole: lam={lam} makes lam*I + A numerically singular")
    return complex((sys.C @ sol)[0, 0])


@dataclass(frozen=True)
class HypothesisReport:
    """Checkable sufficient conditions for the determinant identities."""

    traceclass_bound: float
    norm_Q0: float
    norm_L0: float
    ok: bool


def validate_hypotheses(sys: StateSpaceSystem) -> HypothesisReport:
    """Report the trace-class bound and the operator norms of Q_0 and L_0.

    ok requires both Gramian norms to be strictly below 1, the operating
    hypothesis for all generating-function constructions.
    """
    from detfield.gramian import ctrl_gramian, obs_gramian

    eig = _eig(sys)
    if eig.usable:
        # sum over eigenpairs of |C u_j|^2 / Re(kappa_j) with unit eigenvectors
        norms = np.linalg.norm(eig.V, axis=0)
        bound = float(np.sum(np.abs(eig.CV / norms) ** 2 / eig.kappas.real))
    else:
        bound = float("inf")
    q0 = float(np.linalg.norm(obs_gramian(sys, 0.0), 2))
    l0 = float(np.linalg.norm(ctrl_gramian(sys, 0.0), 2))
    return HypothesisReport(
        traceclass_bound=bound,
        norm_Q0=q0,
        norm_L0=l0,
        ok=bool(q0 < 1.0 and l0 < 1.0),
    )
