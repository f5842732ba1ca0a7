"""Product-integration quadrature for weakly singular convolution kernels.

Everything here works in a transformed abscissa in which the kernels take
the form (s_n - sigma)^(b-1), possibly times a Mittag-Leffler factor of
(s_n - sigma)^a.  Kernels are integrated exactly against the
piecewise-linear interpolant of the data: the pure power kernel via
closed-form hat-function moments, and the power-times-Mittag-Leffler
kernel via its closed-form antiderivative (every such kernel the solvers
need is of the matched shape u^(b-1) E_{a,b}(lam u^a), whose primitive is
again a single Mittag-Leffler term).  The only discretization error left
is the linear interpolation of the data being convolved.
"""

from __future__ import annotations

import math

import numpy as np

from .special import ml_two_array

__all__ = [
    "leggauss_nodes",
    "ml_product_matrix",
    "ml_product_row",
    "power_integral_at",
    "power_kernel_weights",
]

_LEG_CACHE: dict = {}


def leggauss_nodes(n: int, a: float, b: float):
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    got = _LEG_CACHE.get(n)
    if got is None:
        got = np.polynomial.legendre.leggauss(n)
        _LEG_CACHE[n] = got
    x, w = got
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * x, half * w


def _pow_diff(hi, lo, d):
    """hi**d - lo**d for 0 <= lo <= hi, stable when hi is close to lo."""
    hi = np.asarray(hi, dtype=float)
    lo = np.asarray(lo, dtype=float)
    out = np.empty(np.broadcast(hi, lo).shape)
    lo_b = np.broadcast_to(lo, out.shape)
    hi_b = np.broadcast_to(hi, out.shape)
    zero = lo_b == 0.0
    out[zero] = hi_b[zero] ** d
    nz = ~zero
    if np.any(nz):
        h, l = hi_b[nz], lo_b[nz]
        r = (h - l) / l
        near = r < 0.25
        res = np.empty(h.shape)
        res[near] = l[near] ** d * np.expm1(d * np.log1p(r[near]))
        res[~near] = h[~near] ** d - l[~near] ** d
        out[nz] = res
    return out


def _cell_hat_weights(uR, uL, delta):
    """Exact hat-function weights for one cell under the kernel u^(delta-1).

    The cell [sigma_L, sigma_R] maps to u = s_n - sigma in [uL, uR].
    Returns (wL, wR): the weights multiplying the data values at sigma_L
    (u = uR) and sigma_R (u = uL).
    """
    h = uR - uL
    m0 = _pow_diff(uR, uL, delta) / delta
    # integral of (uR - u) u^(delta-1) via integration by parts
    m1 = _pow_diff(uR, uL, delta + 1.0) / (delta * (delta + 1.0)) - h * uL**delta / delta
    # cells whose endpoints collide in floating point carry no mass
    wide = h > 0.0
    wR = np.where(wide, m1 / np.where(wide, h, 1.0), 0.0)
    return m0 - wR, wR


def power_kernel_weights(s, delta: float) -> np.ndarray:
    """Lower-triangular matrix W of product-integration weights.

    (W @ f)[n] equals the integral over [0, s_n] of
    (s_n - sigma)^(delta-1) times the piecewise-linear interpolant of f on
    the nodes ``s``; exact for piecewise-linear data.  Works on any
    strictly increasing grid with s[0] = 0; requires delta > 0.
    """
    if delta <= 0.0:
        raise ValueError(f"power_kernel_weights: delta must be positive, got {delta:g}")
    s = np.asarray(s, dtype=float)
    if s.ndim != 1 or s.size < 2 or s[0] != 0.0 or np.any(np.diff(s) <= 0.0):
        raise ValueError("power_kernel_weights: grid must increase strictly from 0")
    npt = s.size
    W = np.zeros((npt, npt))
    for n in range(1, npt):
        uR = s[n] - s[:n]
        uL = s[n] - s[1 : n + 1]
        wL, wR = _cell_hat_weights(uR, uL, delta)
        W[n, :n] += wL
        W[n, 1 : n + 1] += wR
    return W


def _ml_antiderivatives(order: float, btype: float, lam: float, u):
    """First and second antiderivatives of the matched power-ML kernel.

    The kernel K(u) = u^(btype-1) E_{order,btype}(lam u^order) satisfies
    d/du [u^b E_{a,b+1}(lam u^a)] = u^(b-1) E_{a,b}(lam u^a) term by term,
    so J0(u) = u^btype E_{order,btype+1}(lam u^order) integrates K from 0
    and J1(u) = u^(btype+1) E_{order,btype+2}(lam u^order) integrates J0.
    """
    u = np.asarray(u, dtype=float)
    z = lam * u**order
    j0 = u**btype * ml_two_array(order, btype + 1.0, z)
    j1 = u ** (btype + 1.0) * ml_two_array(order, btype + 2.0, z)
    return j0, j1


def _check_ml_kernel_args(s, order, btype):
    if order <= 0.0 or btype <= 0.0:
        raise ValueError("matched ML kernel needs positive order and btype")
    if s.ndim != 1 or s.size < 2 or s[0] != 0.0 or np.any(np.diff(s) <= 0.0):
        raise ValueError("grid must increase strictly from 0")


def ml_product_row(s, order: float, btype: float, lam: float) -> np.ndarray:
    """Weights w with w @ g equal to the convolution

        integral over [0, S] of
        (S - sigma)^(btype-1) * E_{order,btype}(lam (S - sigma)^order) * g(sigma)

    at S = s[-1], exact (to rounding) for piecewise-linear g on the
    strictly increasing grid ``s`` starting at 0.  Both kernel factors are
    integrated in closed form, so the only discretization error a caller
    sees is the linear interpolation of g itself.
    """
    s = np.asarray(s, dtype=float)
    _check_ml_kernel_args(s, order, btype)
    S = s[-1]
    u = S - s  # descending: u[j] pairs with data node s[j]
    j0, j1 = _ml_antiderivatives(order, btype, lam, u)
    # cell j: u in [u[j], u[j-1]]; moments via antiderivative differences
    m0 = j0[:-1] - j0[1:]
    i1 = u[:-1] * j0[:-1] - u[1:] * j0[1:] - (j1[:-1] - j1[1:])
    h = u[:-1] - u[1:]
    # cells collapsed by rounding (sigma-gap below the ulp of S) carry no mass
    wide = h > 0.0
    hs = np.where(wide, h, 1.0)
    w = np.zeros(s.size)
    w[:-1] += np.where(wide, (i1 - u[1:] * m0) / hs, 0.0)
    w[1:] += np.where(wide, (u[:-1] * m0 - i1) / hs, 0.0)
    return w


def ml_product_matrix(s, order: float, btype: float, lam: float) -> np.ndarray:
    """Lower-triangular K with (K @ g)[n] equal to the ml_product_row
    convolution with upper limit s_n, for every node of the uniform grid
    ``s``.  Uniformity lets all rows share one set of lag moments.
    """
    s = np.asarray(s, dtype=float)
    _check_ml_kernel_args(s, order, btype)
    npt = s.size
    h = s[1] - s[0]
    if not np.allclose(np.diff(s), h, rtol=1e-12, atol=1e-15 * max(abs(s[-1]), 1.0)):
        raise ValueError("ml_product_matrix: grid must be uniform")
    lags = np.arange(npt, dtype=float) * h
    j0, j1 = _ml_antiderivatives(order, btype, lam, lags)
    uL, uR = lags[:-1], lags[1:]
    m0 = j0[1:] - j0[:-1]
    i1 = uR * j0[1:] - uL * j0[:-1] - (j1[1:] - j1[:-1])
    far = (i1 - uL * m0) / h  # weight at the data node farther from s_n
    near = (uR * m0 - i1) / h  # weight at the data node nearer to s_n
    K = np.zeros((npt, npt))
    for n in range(1, npt):
        # sigma-cell j in (1..n) occupies lag cell n - j
        K[n, :n] += far[:n][::-1]
        K[n, 1 : n + 1] += near[:n][::-1]
    return K


def power_integral_at(s, vals, delta: float, points) -> np.ndarray:
    """Integral over [0, p] of (p - sigma)^(delta-1) times the
    piecewise-linear data (s, vals), evaluated at each p in ``points``.

    Exact for the interpolant at arbitrary p inside the grid span; p may
    fall between nodes.  Used for inner fractional integrals that must be
    sampled on a different (e.g. graded) grid than the data.
    """
    s = np.asarray(s, dtype=float)
    vals = np.asarray(vals, dtype=float)
    if delta <= 0.0:
        raise ValueError("power_integral_at: delta must be positive")
    if s.ndim != 1 or s.size < 2 or s[0] != 0.0 or np.any(np.diff(s) <= 0.0):
        raise ValueError("power_integral_at: grid must increase strictly from 0")
    points = np.asarray(points, dtype=float)
    if np.any(points > s[-1] * (1.0 + 1e-12)):
        raise ValueError("power_integral_at: point beyond the sampled grid")
    out = np.zeros(points.shape)
    for i, p in np.ndenumerate(points):
        if p <= 0.0:
            continue
        k = int(np.searchsorted(s, p * (1.0 - 1e-15)))
        sig = np.append(s[:k], p)
        v = np.append(vals[:k], np.interp(p, s, vals))
        uR = p - sig[:-1]
        uL = p - sig[1:]
        wL, wR = _cell_hat_weights(uR, uL, delta)
        out[i] = float(np.sum(wL * v[:-1]) + np.sum(wR * v[1:]))
    return out
