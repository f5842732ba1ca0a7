"""Erdelyi-Kober fractional integrals and the Euler-operator fractional
derivative built on them.

The operator family is parameterized by (beta, gamma_w, delta).  For
delta > 0 the integral

    I f (t) = t^(-beta*(gamma_w+delta)) / Gamma(delta)
              * integral over tau in (0, t) of
                (t^beta - tau^beta)^(delta-1) tau^(beta*gamma_w) f(tau) d(tau^beta)

is computed by product integration in sigma = tau^beta: the singular power
kernel is integrated exactly against piecewise-linear data, so the rule is
exact whenever f is piecewise linear in sigma.  For -1 < delta < 0 the
integro-differential interpretation applies one recursion step:

    I^{gamma_w, delta} f = (gamma_w + delta + 1) I^{gamma_w, delta+1} f
                           + (1/beta) I^{gamma_w, delta+1} (tau f')

The fractional power of the Euler-type operator t^theta d/dt of order
alpha in (0,1), for theta < 1 and rho = 1 - theta, is

    D f (t) = rho^alpha t^(-rho*alpha) I_rho^{0, -alpha} f (t)

and its regularized (Caputo-like) counterpart subtracts the f(0) cusp:

    D_reg f = D f - f(0) rho^alpha t^(-rho*alpha) / Gamma(1 - alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .quadrature import _cell_hat_weights, _pow_diff
from .special import gamma

__all__ = [
    "EKParams",
    "FracParams",
    "SampledFunction",
    "ek_integral",
    "ek_integral_on_grid",
    "ek_integrodiff",
    "hyper_bessel",
    "make_time_grid",
    "reg_caputo_hb",
    "reg_caputo_on_grid",
]


@dataclass(frozen=True)
class FracParams:
    """Order alpha in (0,1) and Euler-weight exponent theta < 1 of the
    fractional operator; rho = 1 - theta is the induced clock exponent."""

    alpha: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.theta)):
            raise ValueError("FracParams: parameters must be finite")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"FracParams: alpha must lie in (0, 1), got {self.alpha:g}")
        if not self.theta < 1.0:
            raise ValueError(f"FracParams: theta must be below 1, got {self.theta:g}")

    @property
    def rho(self) -> float:
        return 1.0 - self.theta


@dataclass(frozen=True)
class EKParams:
    """Parameter triple (beta, gamma_w, delta) of the fractional integral;
    beta > 0, delta != 0 (delta < 0 means the integro-differential form)."""

    beta: float
    gamma_w: float
    delta: float

    def __post_init__(self):
        for v in (self.beta, self.gamma_w, self.delta):
            if not math.isfinite(v):
                raise ValueError("EKParams: parameters must be finite")
        if self.beta <= 0.0:
            raise ValueError(f"EKParams: beta must be positive, got {self.beta:g}")
        if self.delta == 0.0:
            raise ValueError("EKParams: delta must be nonzero")


@dataclass
class SampledFunction:
    """Function samples on a grid t_0 = 0 < t_1 < ... < t_N, interpreted
    piecewise-linearly.  ``deriv`` optionally carries analytic nodal
    derivative values df/dt; otherwise derivatives come from the
    interpolant."""

    grid: np.ndarray
    values: np.ndarray
    deriv: np.ndarray | None = field(default=None)

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise ValueError("SampledFunction: grid must be 1-d with at least 2 nodes")
        if self.grid[0] != 0.0:
            raise ValueError("SampledFunction: grid must start at 0")
        if not np.all(np.diff(self.grid) > 0.0):
            raise ValueError("SampledFunction: grid must be strictly increasing")
        if self.values.shape != self.grid.shape:
            raise ValueError("SampledFunction: values shape must match grid")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("SampledFunction: values must be finite")
        if self.deriv is not None:
            self.deriv = np.asarray(self.deriv, dtype=float)
            if self.deriv.shape != self.grid.shape:
                raise ValueError("SampledFunction: deriv shape must match grid")
            if not np.all(np.isfinite(self.deriv)):
                raise ValueError("SampledFunction: deriv must be finite")

    @classmethod
    def from_callable(cls, fn, grid, deriv_fn=None) -> "SampledFunction":
        grid = np.asarray(grid, dtype=float)
        vals = np.array([fn(float(t)) for t in grid], dtype=float)
        der = None
        if deriv_fn is not None:
            der = np.array([deriv_fn(float(t)) for t in grid], dtype=float)
        return cls(grid, vals, der)

    def value_at(self, t: float) -> float:
        return float(np.interp(t, self.grid, self.values))


def make_time_grid(horizon: float, n: int, rho: float) -> np.ndarray:
    """Time nodes whose images under t -> t^rho are uniform on [0, horizon^rho].

    This is the natural abscissa for every integral the package computes;
    n+1 nodes are returned.
    """
    if horizon <= 0.0:
        raise ValueError("make_time_grid: horizon must be positive")
    if n < 1:
        raise ValueError("make_time_grid: need at least one cell")
    if rho <= 0.0:
        raise ValueError("make_time_grid: rho must be positive")
    s = np.linspace(0.0, horizon**rho, n + 1)
    t = s ** (1.0 / rho)
    t[0] = 0.0
    t[-1] = horizon
    return t


# ------------------------------------------------------------------ core


def _sigma_profile(f: SampledFunction, beta: float, S: float):
    """Nodes sigma = t^beta clipped to [0, S] with S appended, and the
    data values at those nodes (linear interpolation in sigma)."""
    sig_full = f.grid**beta
    tol = 1e-12 * max(sig_full[-1], 1.0)
    if S > sig_full[-1] + tol:
        raise ValueError("evaluation point lies beyond the sampled grid")
    S = min(S, float(sig_full[-1]))
    keep = sig_full < S * (1.0 - 1e-14)
    sig = np.append(sig_full[keep], S)
    vals = np.append(f.values[keep], np.interp(S, sig_full, f.values))
    return sig, vals


def _raw_nodal(sig, gvals, S, delta):
    """Integral of (S-sigma)^(delta-1) * PL[g](sigma) over [0, S]."""
    uR = S - sig[:-1]
    uL = S - sig[1:]
    wL, wR = _cell_hat_weights(uR, uL, delta)
    return float(np.sum(wL * gvals[:-1]) + np.sum(wR * gvals[1:]))


def _raw_affine(sig, a, b, S, delta):
    """Integral of (S-sigma)^(delta-1) * (a_j + b_j sigma) with per-cell
    affine data."""
    uR = S - sig[:-1]
    uL = S - sig[1:]
    m0 = _pow_diff(uR, uL, delta) / delta
    msig = S * m0 - _pow_diff(uR, uL, delta + 1.0) / (delta + 1.0)
    return float(np.sum(a * m0) + np.sum(b * msig))


def _first_cell_power(sig, f0, f1, S, delta, gw):
    """Exact-in-sigma^gw integral over the first cell [0, sigma_1] of
    (S-sigma)^(delta-1) sigma^gw (f0 + (f1-f0) sigma/sigma_1).

    For S == sigma_1 this is a Beta-function moment; otherwise the smooth
    kernel factor is linearized across the cell (its curvature there is
    negligible against quadrature-level tolerances).
    """
    s1 = sig[1]
    df = f1 - f0
    if S <= s1 * (1.0 + 1e-14):
        bg1 = gamma(gw + 1.0) * gamma(delta) / gamma(gw + delta + 1.0)
        bg2 = gamma(gw + 2.0) * gamma(delta) / gamma(gw + delta + 2.0)
        return S ** (gw + delta) * (f0 * bg1 + df * bg2)
    k0 = S ** (delta - 1.0)
    k1 = (S - s1) ** (delta - 1.0)
    dk = k1 - k0
    c0 = f0 * k0
    c1 = f0 * dk / s1 + df * k0 / s1
    c2 = df * dk / (s1 * s1)
    return (
        c0 * s1 ** (gw + 1.0) / (gw + 1.0)
        + c1 * s1 ** (gw + 2.0) / (gw + 2.0)
        + c2 * s1 ** (gw + 3.0) / (gw + 3.0)
    )


def ek_integral(f: SampledFunction, p: EKParams, t: float) -> float:
    """Fractional integral of order delta > 0 at a point t in (0, grid end].

    Product integration in sigma = tau^beta, exact for data piecewise
    linear in sigma when gamma_w = 0; for gamma_w != 0 the power weight is
    carried exactly across the first cell and nodally elsewhere.
    """
    if p.delta <= 0.0:
        raise ValueError("ek_integral: requires delta > 0")
    if not t > 0.0:
        raise ValueError("ek_integral: t must be positive")
    gw = p.gamma_w
    if gw != 0.0 and gw <= -1.0:
        raise ValueError("ek_integral: gamma_w must exceed -1 for integrability")
    S = t**p.beta
    sig, vals = _sigma_profile(f, p.beta, S)
    if gw == 0.0:
        raw = _raw_nodal(sig, vals, S, p.delta)
    else:
        g = np.zeros_like(vals)
        g[1:] = sig[1:] ** gw * vals[1:]
        raw = _raw_nodal(sig, g, S, p.delta)
        uR = S - sig[0]
        uL = S - sig[1]
        wL, wR = _cell_hat_weights(np.array([uR]), np.array([uL]), p.delta)
        raw -= float(wL[0] * g[0] + wR[0] * g[1])
        raw += _first_cell_power(sig, vals[0], vals[1], S, p.delta, gw)
    return S ** (-(gw + p.delta)) / gamma(p.delta) * raw


def _slopes_in_sigma(f: SampledFunction, beta: float):
    sig = f.grid**beta
    return sig, np.diff(f.values) / np.diff(sig)


def ek_integrodiff(f: SampledFunction, p: EKParams, t: float) -> float:
    """Integro-differential form for -1 < delta < 0 (one recursion step):
    (gamma_w+delta+1) I^{gamma_w,delta+1} f + (1/beta) I^{gamma_w,delta+1} (tau f').

    The derivative is the interpolant's piecewise-constant slope unless the
    sample carries an analytic derivative channel.
    """
    if p.delta >= 0.0:
        raise ValueError("ek_integrodiff: requires delta < 0")
    if p.delta <= -1.0:
        raise ValueError("ek_integrodiff: delta <= -1 is not supported")
    p_up = EKParams(p.beta, p.gamma_w, p.delta + 1.0)
    term1 = (p.gamma_w + p.delta + 1.0) * ek_integral(f, p_up, t)
    if f.deriv is not None:
        tfp = SampledFunction(f.grid, f.grid * f.deriv)
        term2 = ek_integral(tfp, p_up, t) / p.beta
        return term1 + term2
    # tau f' = beta * sigma * (d f / d sigma): per-cell affine in sigma,
    # carrying sigma^gamma_w nodally via its own linear interpolant
    S = t**p.beta
    _, slopes = _slopes_in_sigma(f, p.beta)
    sigS, _ = _sigma_profile(f, p.beta, S)
    ncell = sigS.size - 1
    # kept nodes are a prefix of the grid, so cell j inherits slope j; the
    # clipped last cell lies inside original cell ncell-1
    cell_slope = slopes[:ncell]
    gw = p.gamma_w
    if gw == 0.0:
        a = np.zeros(ncell)
        b = cell_slope
        raw = _raw_affine(sigS, a, b, S, p_up.delta)
    else:
        # data sigma^gw * sigma * slope: interpolate sigma^(gw+1) nodally
        pw = sigS ** (gw + 1.0)
        h = np.diff(sigS)
        b = cell_slope * np.diff(pw) / h
        a = cell_slope * (pw[:-1] * sigS[1:] - pw[1:] * sigS[:-1]) / h
        raw = _raw_affine(sigS, a, b, S, p_up.delta)
    term2 = S ** (-(gw + p_up.delta)) / gamma(p_up.delta) * raw
    return term1 + term2


def ek_integral_on_grid(f: SampledFunction, p: EKParams) -> np.ndarray:
    """:func:`ek_integral` evaluated at every grid node at once.

    The t = 0 entry holds the continuous limit f(0) *
    Gamma(gamma_w+1)/Gamma(gamma_w+delta+1).
    """
    if p.delta <= 0.0:
        raise ValueError("ek_integral_on_grid: requires delta > 0")
    gw = p.gamma_w
    if gw != 0.0 and gw <= -1.0:
        raise ValueError("ek_integral_on_grid: gamma_w must exceed -1")
    sig = f.grid**p.beta
    npt = sig.size
    out = np.empty(npt)
    out[0] = f.values[0] * gamma(gw + 1.0) / gamma(gw + p.delta + 1.0)
    gd = gamma(p.delta)
    if gw == 0.0:
        g = f.values
    else:
        g = np.zeros_like(f.values)
        g[1:] = sig[1:] ** gw * f.values[1:]
    for n in range(1, npt):
        S = sig[n]
        s_row = sig[: n + 1]
        raw = _raw_nodal(s_row, g[: n + 1], S, p.delta)
        if gw != 0.0:
            uR = np.array([S - s_row[0]])
            uL = np.array([S - s_row[1]])
            wL, wR = _cell_hat_weights(uR, uL, p.delta)
            raw -= float(wL[0] * g[0] + wR[0] * g[1])
            raw += _first_cell_power(s_row, f.values[0], f.values[1], S, p.delta, gw)
        out[n] = S ** (-(gw + p.delta)) / gd * raw
    return out


def hyper_bessel(f: SampledFunction, fp: FracParams, t: float) -> float:
    """Fractional power of the Euler-type operator t^theta d/dt applied to
    f at t > 0:  rho^alpha t^(-rho alpha) I_rho^{0,-alpha} f."""
    if not t > 0.0:
        raise ValueError("hyper_bessel: t must be positive")
    rho = fp.rho
    v = ek_integrodiff(f, EKParams(rho, 0.0, -fp.alpha), t)
    return rho**fp.alpha * t ** (-rho * fp.alpha) * v


def reg_caputo_hb(f: SampledFunction, fp: FracParams, t: float) -> float:
    """Regularized (Caputo-like) fractional Euler-operator derivative:
    the unregularized form minus f(0) rho^alpha t^(-rho alpha)/Gamma(1-alpha)."""
    rho = fp.rho
    cusp = f.values[0] * rho**fp.alpha * t ** (-rho * fp.alpha) / gamma(1.0 - fp.alpha)
    return hyper_bessel(f, fp, t) - cusp


def reg_caputo_on_grid(f: SampledFunction, fp: FracParams) -> np.ndarray:
    """Regularized derivative at every grid node; index 0 carries the
    limit value 0 (the regularization removes the t -> 0 singularity for
    sampled data with finite slope in the transformed clock)."""
    rho = fp.rho
    alpha = fp.alpha
    sig = f.grid**rho
    npt = sig.size
    delta = 1.0 - alpha
    if f.deriv is not None:
        tfp_vals = f.grid * f.deriv
    else:
        tfp_vals = None
        slopes = np.diff(f.values) / np.diff(sig)
    out = np.zeros(npt)
    g1a = gamma(1.0 - alpha)
    for n in range(1, npt):
        S = sig[n]
        s_row = sig[: n + 1]
        i1 = _raw_nodal(s_row, f.values[: n + 1], S, delta)
        if tfp_vals is not None:
            i2 = _raw_nodal(s_row, tfp_vals[: n + 1], S, delta) / rho
        else:
            i2 = _raw_affine(s_row, np.zeros(n), slopes[:n], S, delta)
        ekid = (1.0 - alpha) * S ** (-delta) / g1a * i1 + S ** (-delta) / g1a * i2
        out[n] = rho**alpha * S ** (-alpha) * ekid - f.values[0] * rho**alpha * S ** (
            -alpha
        ) / g1a
    return out
