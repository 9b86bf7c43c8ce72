"""Point-field quantities from operator spectra: counts, gaps, correlations.

The eigenvalues of the point-field operator lie in [0, 1] and act as
independent Bernoulli success probabilities for the number of points
nu(x, inf); the generating function is the shifted determinant.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from detfield.fredholm import HypothesisError
from detfield.gramian import ctrl_gramian, hankel_product_R, obs_gramian
from detfield.realization import StateSpaceSystem

_CLAMP_TOL = 1e-10


@dataclass(frozen=True)
class CountDistribution:
    """Operator eigenvalues and the induced law of the point count."""

    eigenvalues: np.ndarray
    probabilities: np.ndarray

    def __post_init__(self):
        eigs = np.asarray(self.eigenvalues, dtype=float)
        probs = np.asarray(self.probabilities, dtype=float)
        if abs(probs.sum() - 1.0) > 1e-12 or np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative and sum to 1 within 1e-12")
        object.__setattr__(self, "eigenvalues", eigs)
        object.__setattr__(self, "probabilities", probs)

    @property
    def mean(self) -> float:
        return float(np.sum(self.eigenvalues))


def spectrum_for_case(sys: StateSpaceSystem, x, case) -> np.ndarray:
    """Eigenvalues of the point-field operator for the three generating cases.

    case "i"   requires A = A^dag, C = B^dag: spectrum of Q_x
    case "ii"  requires a real system: squared spectrum of R_x
    case "iii" general: spectrum of L_x Q_x via the Hermitian form
               Q_x^{1/2} L_x Q_x^{1/2}
    """
    x = float(x)
    if case == "i":
        if not sys.is_selfadjoint():
            raise HypothesisError("case i requires A = A^dag and C = B^dag")
        Q = obs_gramian(sys, x)
        _require_contractive(Q, "Q_x")
        return np.clip(np.linalg.eigvalsh(Q), 0.0, None)
    if case == "ii":
        if not sys.is_real():
            raise HypothesisError("case ii requires a real system (real impulse response)")
        _require_contractive(obs_gramian(sys, x), "Q_x")
        _require_contractive(ctrl_gramian(sys, x), "L_x")
        mu = np.linalg.eigvals(hankel_product_R(sys, x)) ** 2
        if np.abs(mu.imag).max(initial=0.0) > 1e-10:
            raise ArithmeticError("squared Hankel spectrum has a large imaginary part")
        return np.sort(mu.real)
    if case == "iii":
        Q = obs_gramian(sys, x)
        L = ctrl_gramian(sys, x)
        _require_contractive(Q, "Q_x")
        _require_contractive(L, "L_x")
        w, U = np.linalg.eigh(Q)
        Q12 = (U * np.sqrt(np.clip(w, 0.0, None))) @ U.conj().T
        return np.clip(np.linalg.eigvalsh(Q12 @ L @ Q12), 0.0, None)
    raise ValueError(f"case must be 'i', 'ii' or 'iii', got {case!r}")


def _require_contractive(M, name):
    norm = float(np.linalg.norm(M, 2))
    if norm >= 1.0:
        raise HypothesisError(f"operator norm of {name} is {norm:.6g} >= 1")


def generating_function(cd, z) -> complex:
    """E z^nu = prod_j (1 + (z - 1) lambda_j)."""
    eigs = cd.eigenvalues if isinstance(cd, CountDistribution) else np.asarray(cd, dtype=float)
    return complex(np.prod(1.0 + (complex(z) - 1.0) * eigs))


def count_distribution(eigenvalues) -> CountDistribution:
    """Poisson-binomial law of the count from Bernoulli eigenvalues.

    Convolves the factors (1 - lambda_j) + lambda_j z; eigenvalues outside
    [0, 1] beyond 1e-10 are rejected, small excursions are clamped with a
    warning.
    """
    eigs = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
    if np.any(eigs < -_CLAMP_TOL) or np.any(eigs > 1.0 + _CLAMP_TOL):
        raise ValueError("eigenvalues must lie in [0, 1] up to 1e-10")
    clipped = np.clip(eigs, 0.0, 1.0)
    if np.any(clipped != eigs):
        warnings.warn("eigenvalues clamped to [0, 1]", stacklevel=2)
    probs = np.array([1.0])
    for lam in clipped:
        probs = np.convolve(probs, [1.0 - lam, lam])
    return CountDistribution(eigenvalues=clipped, probabilities=probs)


def gap_probability(cd: CountDistribution) -> float:
    """P[no points] = p_0 = prod (1 - lambda_j)."""
    return float(cd.probabilities[0])


def density_ratio(sys: StateSpaceSystem, x) -> float:
    """Logarithmic density F'(x)/F(x) = trace((A + A^dag) Q_x (I - Q_x)^{-1})."""
    Q = obs_gramian(sys, float(x))
    _require_contractive(Q, "Q_x")
    val = np.trace((sys.A + sys.A.conj().T) @ Q @ np.linalg.inv(np.eye(sys.n) - Q))
    return float(val.real)


def correlation(kernel, points) -> float:
    """n-point correlation det[K(x_i, x_j)] for a kernel evaluator."""
    pts = list(points)
    M = np.array([[kernel(a, b) for b in pts] for a in pts], dtype=complex)
    val = np.linalg.det(M)
    return float(val.real) if abs(val.imag) <= 1e-12 * max(1.0, abs(val)) else complex(val)


def sample_count(cd: CountDistribution, seed) -> int:
    """Draw the number of points by inverse CDF with a seeded generator."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cdf = np.cumsum(cd.probabilities)
    return int(np.searchsorted(cdf, rng.random(), side="right"))
