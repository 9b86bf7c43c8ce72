"""Quadrature rules shared by the Nystrom discretizations and residual checks."""

import numpy as np
import scipy.special


def gauss_legendre(a, b, n):
    """Gauss-Legendre nodes and weights on the finite interval (a, b)."""
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (t + 1.0), half * w


def gauss_rational(n, scale=1.0):
    """Rule on (0, inf) from Gauss-Legendre via the map u = scale * t / (1 - t).

    Nodes cluster near 0 and stretch to infinity; suitable for integrands
    that decay at least algebraically fast.  Weights carry the Jacobian
    scale / (1 - t)^2.
    """
    t, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (t + 1.0)
    w = 0.5 * w
    nodes = scale * t / (1.0 - t)
    weights = scale * w / (1.0 - t) ** 2
    return nodes, weights


def gauss_laguerre_folded(n, rate=1.0):
    """Rule on (0, inf) with the Laguerre weight folded into the weights.

    Approximates integrals of functions decaying like exp(-rate * t).  The
    folded weights are formed in log space; far nodes whose raw weights
    underflow to zero are dropped (their contribution is below the
    representable range for any admissible integrand).
    """
    t, w = scipy.special.roots_laguerre(n)
    keep = w > 0.0
    t, w = t[keep], w[keep]
    folded = np.exp(np.log(w) + t)
    return t / rate, folded / rate
