"""Concrete kernels of random matrix theory: Airy, sine, Hamiltonian systems.

The Airy function is evaluated in-repo so the whole oracle chain is
self-contained: Maclaurin series for |x| <= 4.5, Taylor continuation from
precomputed high-precision anchors on 4.5 < |x| <= 9.5 (a plain float64
series or asymptotic expansion cannot reach 1e-12 absolute accuracy in that
band), and the standard asymptotic expansions beyond.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate

from detfield import _quad

_AI0 = 0.3550280538878172392600631860041831764  # Ai(0) = 3^(-2/3)/Gamma(2/3)
_AIP0 = -0.2588194037928067984051835601892039634  # Ai'(0) = -3^(-1/3)/Gamma(1/3)

_SERIES_CUT = 4.5
_ANCHOR_CUT = 9.5
_NEG_LIMIT = -200.0

# (x0, Ai(x0), Ai'(x0)) seeds for the Taylor continuation band, 22 digits
_TAYLOR_ANCHORS = [
    (-9.75, 0.252624762596343355527, 0.616095785168524459607),
    (-9.25, 0.2052398087603554231491, -0.7550497682678933243095),
    (-8.75, -0.2382300384596355144189, -0.6738561861206686044626),
    (-8.25, -0.2545363209965606465541, 0.6085182968874138997986),
    (-7.75, 0.1749779007967651473, 0.8112327355065282552278),
    (-7.25, 0.3237405732111861462213, -0.3002289950473540814629),
    (-6.75, -0.03338479058876495899085, -0.9067040516921281235351),
    (-6.25, -0.3496120516108905098546, -0.1910862595234171543686),
    (-5.75, -0.1888420989994473668025, 0.7391656870866844463963),
    (-5.25, 0.2190094478450132095664, 0.701566726175188952154),
    (-4.75, 0.3759320343291421327236, -0.1270996062064202669854),
    (4.75, 0.0001904614592681605127238, -0.000424592689456562082798),
    (5.25, 0.00006081011452242365287334, -0.0001420946171972681576102),
    (5.75, 0.00001842124619773024582063, -0.00004494062122298348062874),
    (6.25, 0.000005305861748752081026323, -0.00001346911345145098343915),
    (6.75, 0.000001455812744578875868998, -0.000003834455740949934238659),
    (7.25, 3.811563018337377610797e-7, -0.000001039046294628025735228),
    (7.75, 9.537038961641585223673e-8, -2.684928867953261859794e-7),
    (8.25, 2.283713944482228170924e-8, -6.626952666987631228217e-8),
    (8.75, 5.240114231891752419198e-9, -1.564676202757794909372e-8),
    (9.25, 1.15350415572834016084e-9, -3.538763310465634886517e-9),
    (9.75, 2.438632135722847079048e-10, -7.67593065186179304943e-10),
]

_N_TAYLOR = 26


def _build_taylor_tables():
    xs = np.array([a[0] for a in _TAYLOR_ANCHORS])
    coeffs = np.zeros((len(_TAYLOR_ANCHORS), _N_TAYLOR))
    for i, (x0, y0, y1) in enumerate(_TAYLOR_ANCHORS):
        c = coeffs[i]
        c[0], c[1] = y0, y1
        for nn in range(_N_TAYLOR - 2):
            # y'' = x y  =>  c_{n+2} = (x0 c_n + c_{n-1}) / ((n+1)(n+2))
            prev = c[nn - 1] if nn >= 1 else 0.0
            c[nn + 2] = (x0 * c[nn] + prev) / ((nn + 1) * (nn + 2))
    return xs, coeffs


_ANCHOR_X, _ANCHOR_COEF = _build_taylor_tables()

_N_ASYM = 20


def _build_asym_coeffs():
    u = np.empty(_N_ASYM)
    v = np.empty(_N_ASYM)
    u[0] = v[0] = 1.0
    for k in range(1, _N_ASYM):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        v[k] = u[k] * (6 * k + 1) / (1 - 6 * k)
    return u, v


_ASYM_U, _ASYM_V = _build_asym_coeffs()


def _maclaurin(x):
    x3 = x * x * x
    a = np.ones_like(x)
    b = x.copy()
    f, g = a.copy(), b.copy()
    fp = np.zeros_like(x)
    gp = np.ones_like(x)
    tf = 0.5 * x * x  # first term of f'
    tg = x3 / 3.0  # first term of g' after the constant
    fp = fp + tf
    gp = gp + tg
    for k in range(1, 41):
        a = a * x3 / ((3 * k - 1) * (3 * k))
        b = b * x3 / ((3 * k) * (3 * k + 1))
        f = f + a
        g = g + b
        tf = tf * x3 * (k + 1) / (k * (3 * k + 2) * (3 * k + 3))
        tg = tg * x3 / ((3 * k + 1) * (3 * k + 3))
        fp = fp + tf
        gp = gp + tg
    return _AI0 * f + _AIP0 * g, _AI0 * fp + _AIP0 * gp


def _taylor_band(x):
    idx = np.searchsorted(_ANCHOR_X, x)
    idx = np.clip(idx, 1, len(_ANCHOR_X) - 1)
    idx = np.where(np.abs(x - _ANCHOR_X[idx - 1]) <= np.abs(x - _ANCHOR_X[idx]), idx - 1, idx)
    delta = x - _ANCHOR_X[idx]
    C = _ANCHOR_COEF[idx]
    powers = np.ones((x.size, _N_TAYLOR))
    for j in range(1, _N_TAYLOR):
        powers[:, j] = powers[:, j - 1] * delta
    ai = np.sum(C * powers, axis=1)
    dcoef = C[:, 1:] * np.arange(1, _N_TAYLOR)
    aip = np.sum(dcoef * powers[:, :-1], axis=1)
    return ai, aip


def _asym_pos(x):
    zeta = (2.0 / 3.0) * x ** 1.5
    inv = 1.0 / zeta
    s_ai = np.zeros_like(x)
    s_aip = np.zeros_like(x)
    p = np.ones_like(x)
    for k in range(_N_ASYM):
        sign = -1.0 if k % 2 else 1.0
        s_ai = s_ai + sign * _ASYM_U[k] * p
        s_aip = s_aip + sign * _ASYM_V[k] * p
        p = p * inv
    pref = np.exp(-zeta) / (2.0 * np.sqrt(np.pi))
    return pref * s_ai / x ** 0.25, -pref * s_aip * x ** 0.25


def _asym_neg(xabs):
    zeta = (2.0 / 3.0) * xabs ** 1.5
    inv2 = 1.0 / (zeta * zeta)
    ce = np.cos(zeta - np.pi / 4.0)
    se = np.sin(zeta - np.pi / 4.0)
    se_u = np.zeros_like(xabs)
    so_u = np.zeros_like(xabs)
    se_v = np.zeros_like(xabs)
    so_v = np.zeros_like(xabs)
    p = np.ones_like(xabs)
    for k in range(_N_ASYM // 2):
        sign = -1.0 if k % 2 else 1.0
        se_u = se_u + sign * _ASYM_U[2 * k] * p
        so_u = so_u + sign * _ASYM_U[2 * k + 1] * p / zeta
        se_v = se_v + sign * _ASYM_V[2 * k] * p
        so_v = so_v + sign * _ASYM_V[2 * k + 1] * p / zeta
        p = p * inv2
    root = np.sqrt(np.pi)
    ai = (ce * se_u + se * so_u) / (root * xabs ** 0.25)
    aip = (xabs ** 0.25 / root) * (se * se_v - ce * so_v)
    return ai, aip


def _airy_both(x):
    x = np.asarray(x, dtype=float)
    if x.size and float(x.min()) < _NEG_LIMIT:
        raise ValueError(f"Airy evaluation limited to x >= {_NEG_LIMIT} (phase accuracy)")
    flat = x.ravel()
    ai = np.empty_like(flat)
    aip = np.empty_like(flat)
    absf = np.abs(flat)
    m_ser = absf <= _SERIES_CUT
    m_tay = (absf > _SERIES_CUT) & (absf <= _ANCHOR_CUT)
    m_pos = (flat > _ANCHOR_CUT)
    m_neg = (flat < -_ANCHOR_CUT)
    if m_ser.any():
        ai[m_ser], aip[m_ser] = _maclaurin(flat[m_ser])
    if m_tay.any():
        ai[m_tay], aip[m_tay] = _taylor_band(flat[m_tay])
    if m_pos.any():
        ai[m_pos], aip[m_pos] = _asym_pos(flat[m_pos])
    if m_neg.any():
        ai[m_neg], aip[m_neg] = _asym_neg(-flat[m_neg])
    return ai.reshape(x.shape), aip.reshape(x.shape)


def airy(x):
    """Airy function Ai(x); accepts scalars or arrays.

    Validated to 1e-12 absolute accuracy on [-20, 20]; arguments below -200
    are rejected because the oscillation phase can no longer be resolved.
    """
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    ai, _ = _airy_both(np.atleast_1d(np.asarray(x, dtype=float)))
    return float(ai[0]) if scalar else ai


def airy_deriv(x):
    """Derivative Ai'(x); accepts scalars or arrays."""
    scalar = np.isscalar(x) or np.asarray(x).ndim == 0
    _, aip = _airy_both(np.atleast_1d(np.asarray(x, dtype=float)))
    return float(aip[0]) if scalar else aip


def airy_kernel(x, y, lam=0.0) -> float:
    """Airy kernel (Ai(x-lam) Ai'(y-lam) - Ai'(x-lam) Ai(y-lam))/(x - y).

    The diagonal is the l'Hopital limit Ai'(s)^2 - s Ai(s)^2 with s = x - lam.
    """
    x, y, lam = float(x), float(y), float(lam)
    if abs(x - y) <= 1e-10:
        s = x - lam
        vals, ders = _airy_both(np.array([s]))
        return float(ders[0] ** 2 - s * vals[0] ** 2)
    vals, ders = _airy_both(np.array([x - lam, y - lam]))
    return float((vals[0] * ders[1] - ders[0] * vals[1]) / (x - y))


def _airy_kernel_matrix(xs, lam=0.0):
    """Airy kernel sampled on a grid, with the limit formula on the diagonal."""
    s = np.asarray(xs, dtype=float) - lam
    ai, aip = _airy_both(s)
    diff = np.subtract.outer(s, s)
    np.fill_diagonal(diff, 1.0)
    K = (np.outer(ai, aip) - np.outer(aip, ai)) / diff
    np.fill_diagonal(K, aip ** 2 - s * ai ** 2)
    return K


def airy_square_check(x, y, lam=0.0, n_nodes=200):
    """Pair (kernel value, quadrature of int_0^inf Ai(x+u-lam) Ai(u+y-lam) du).

    The integral uses Gauss-Legendre mapped to (0, inf); superexponential
    decay of the Airy tail makes the far nodes negligible.
    """
    if n_nodes < 100:
        raise ValueError("need at least 100 quadrature nodes")
    x, y, lam = float(x), float(y), float(lam)
    tail = abs(airy(x + 12.0 - lam) * airy(12.0 + y - lam)) * 10.0
    if tail > 1e-10:
        raise ArithmeticError(f"quadrature tail bound {tail:.2e} violated; arguments decay too slowly")
    u, w = _quad.gauss_rational(n_nodes, scale=3.0)
    a1, _ = _airy_both(x + u - lam)
    a2, _ = _airy_both(u + y - lam)
    return airy_kernel(x, y, lam), float(np.sum(w * a1 * a2))


def sine_kernel(x, y) -> float:
    """Sine kernel sin(x - y) / (pi (x - y)), with diagonal 1/pi."""
    d = float(x) - float(y)
    return float(np.sinc(d / np.pi) / np.pi)


@dataclass(frozen=True)
class HamiltonianKernel:
    """Kernel data from a symmetric Hamiltonian system J Psi' = (lam E + F) Psi.

    psi maps x to a real 2m-vector; E and F map x to real symmetric
    2m x 2m matrices.  Real lam and real Psi only.
    """

    psi: callable
    E: callable
    F: callable
    lam: float = 0.0
    m: int = 1

    def J(self):
        m = self.m
        J = np.zeros((2 * m, 2 * m))
        J[:m, m:] = -np.eye(m)
        J[m:, :m] = np.eye(m)
        return J


def _check_symmetric(M, name):
    M = np.asarray(M, dtype=float)
    if np.abs(M - M.T).max() > 1e-12 * max(1.0, np.abs(M).max()):
        raise ValueError(f"{name}(x) must be symmetric to 1e-12")
    return M


def hamiltonian_kernel(hk: HamiltonianKernel, x, y) -> float:
    """Kernel <J Psi(x), Psi(y)> / (x - y) with the stated diagonal rule."""
    x, y = float(x), float(y)
    px = np.asarray(hk.psi(x), dtype=float)
    J = hk.J()
    null = abs(np.dot(J @ px, px))
    if null > 1e-8 * max(1.0, float(np.dot(px, px))):
        raise ValueError(f"bilinear invariant <J Psi, Psi> = {null:.2e} violated at x={x:.6g}")
    if abs(x - y) <= 1e-10:
        E = _check_symmetric(hk.E(x), "E")
        F = _check_symmetric(hk.F(x), "F")
        return float(np.dot(px, (hk.lam * E + F) @ px))
    py = np.asarray(hk.psi(y), dtype=float)
    return float(np.dot(J @ px, py) / (x - y))


def mercer_trace(kernel, interval, n_nodes=200):
    """Pair (sum of Nystrom eigenvalues, independent integral of the diagonal).

    The eigenvalue sum comes from the symmetrically weighted kernel matrix;
    the diagonal integral uses adaptive quadrature so the two discretizations
    stay independent.  Raises when the matrix has an eigenvalue below -1e-8.
    """
    a, b = float(interval[0]), float(interval[1])
    if np.isinf(b):
        nodes, weights = _quad.gauss_rational(n_nodes, scale=2.0)
        nodes = nodes + a
    else:
        nodes, weights = _quad.gauss_legendre(a, b, n_nodes)
    K = np.array([[kernel(s, t) for t in nodes] for s in nodes], dtype=float)
    sq = np.sqrt(weights)
    M = sq[:, None] * K * sq[None, :]
    M = 0.5 * (M + M.T)
    eigs = np.linalg.eigvalsh(M)
    if eigs.min() < -1e-8 * max(1.0, eigs.max()):
        raise ArithmeticError(f"kernel is not positive semidefinite: min eigenvalue {eigs.min():.3e}")
    integral, _ = scipy.integrate.quad(lambda t: kernel(t, t), a, b, limit=200)
    return float(eigs.sum()), float(integral)


_TW_CUT = 12.0  # Airy kernel mass beyond here is under 1e-18


def tw_gap(s, n_nodes=240, route="direct", check=True) -> float:
    """Gap determinant det(I - K_Airy) on (s, inf) by Nystrom quadrature.

    route "direct" discretizes the Airy kernel itself; route "hankel" uses
    the factorization det(I - G) det(I + G) with G the Hankel matrix of
    Ai(x + y) on the same grid.  With check=True the value is recomputed at
    doubled resolution and a disagreement beyond 1e-8 raises.
    """
    s = float(s)
    if not -8.0 <= s <= 6.0:
        raise ValueError(f"s must lie in [-8, 6], got {s}")
    if n_nodes < 100:
        raise ValueError("need at least 100 quadrature nodes")

    def value(n):
        nodes, weights = _quad.gauss_legendre(s, _TW_CUT, n)
        sq = np.sqrt(weights)
        if route == "direct":
            M = sq[:, None] * _airy_kernel_matrix(nodes) * sq[None, :]
            return float(np.linalg.det(np.eye(n) - M))
        if route == "hankel":
            # the Hankel factor on (s, inf) has kernel Ai(x + y - s)
            ai, _ = _airy_both(np.add.outer(nodes, nodes) - s)
            G = sq[:, None] * ai * sq[None, :]
            eye = np.eye(n)
            return float(np.linalg.det(eye - G) * np.linalg.det(eye + G))
        raise ValueError(f"unknown route {route!r}")

    val = value(n_nodes)
    if check:
        refined = value(2 * n_nodes)
        if abs(val - refined) > 1e-8:
            raise ArithmeticError(
                f"resolution insufficient at s={s}: N={n_nodes} and N={2*n_nodes} "
                f"differ by {abs(val - refined):.3e}"
            )
    return val
