"""Three-body bound states: two photons localized around the TLS.

The pole condition of the photon + bound-state channel,
Z_s G_+(beta_s) = A_s(beta_s, beta_s) with A_s evaluated at total energy
E^(s) = E_s + beta_s, has one real root outside the band on each side
(beta_1 < eps_min, beta_2 > eps_max), giving binding energies
B_s = E_s + beta_s.  The momentum-space components are

    eta_e(k)    = V^2 A_s(eps_k, beta_s) / (2 pi (beta_s - eps_k)),
    eta(k, k')  = V [eta_e(k) + eta_e(k')] / (2 sqrt(2 pi) (B_s - eps - eps')),

normalized by N with Int |eta_e|^2 dk + 2 Int Int |eta|^2 dk dk' = 1/N^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .band import ModelParams, band_edges, dispersion
from .errors import RootNotBracketed, ShellTouching
from .greens import greens_fn, solve_single_bound_states
from .integrals import a_s_family

NORM_GRID = 512


@dataclass(frozen=True)
class BoundState3:
    """Three-body bound state: beta_s, B_s = E_s + beta_s, normalization N."""

    s: int
    beta: float
    B: float
    norm: float


def pole_residual(beta: float, s: int, params: ModelParams) -> float:
    """Z_s G_+(beta) - A_s(beta, beta) on the real axis outside the band."""
    bs = solve_single_bound_states(params)[s - 1]
    zg = bs.Z * greens_fn(beta + 0j, params).real
    return zg - complex(a_s_family(beta, beta, s, params)).real


def _scan_bracket(f, lo: float, hi: float, n: int = 80):
    """First sign change of f on a grid over (lo, hi), or None."""
    xs = np.linspace(lo, hi, n)
    prev_x, prev_f = None, None
    for x in xs:
        try:
            fx = f(x)
        except Exception:
            prev_x, prev_f = None, None
            continue
        if prev_f is not None and np.isfinite(fx) and np.isfinite(prev_f) \
                and fx * prev_f < 0.0:
            return prev_x, x
        prev_x, prev_f = x, fx
    return None


def solve_beta(s: int, params: ModelParams) -> BoundState3:
    """Root of the three-body pole condition on the s side of the band.

    The residual is treated as a scalar function of beta (A_s carries the
    self-consistent E^(s) = E_s + beta).  The search scans between the
    near band edge and the single-photon pole E_s, then expands outward.

    Raises
    ------
    RootNotBracketed
        If no sign change is found; existence depends on parameters.
    """
    bs = solve_single_bound_states(params)[s - 1]
    lo, hi = band_edges(params)
    pad = 1e-7 * params.J

    def f(beta):
        return pole_residual(beta, s, params)

    if s == 1:
        segments = [(bs.E + pad, lo - pad)]
        span = max(abs(bs.E - lo), params.J)
        segments.append((bs.E - 8.0 * span, bs.E - pad))
    else:
        segments = [(hi + pad, bs.E - pad)]
        span = max(abs(bs.E - hi), params.J)
        segments.append((bs.E + pad, bs.E + 8.0 * span))

    for a, b in segments:
        if b <= a:
            continue
        bracket = _scan_bracket(f, a, b)
        if bracket is not None:
            beta = brentq(f, bracket[0], bracket[1], xtol=1e-13, rtol=1e-13)
            norm = _normalization(float(beta), s, params)
            return BoundState3(s=s, beta=float(beta), B=float(bs.E + beta),
                               norm=norm)
    raise RootNotBracketed(
        f"no three-body pole found for s={s} at these parameters")


def eta_e_momentum(k, bs3: BoundState3, params: ModelParams):
    """Excited-component wavefunction eta_e(k) (unnormalized), vectorized."""
    eps = dispersion(np.asarray(k, dtype=float), params)
    avals = a_s_family(np.atleast_1d(eps), bs3.beta, bs3.s, params)
    out = params.V ** 2 * np.atleast_1d(avals) / (bs3.beta - np.atleast_1d(eps)) \
        / (2.0 * np.pi)
    return out if np.asarray(k).ndim else complex(out[0])


def eta2_momentum(k, kp, bs3: BoundState3, params: ModelParams,
                  shell_tol: float = 1e-9):
    """Symmetric two-photon component eta(k, k') (unnormalized).

    Raises
    ------
    ShellTouching
        If |B_s - eps - eps'| falls under tolerance: the state is not
        truly bound at these parameters.
    """
    eps, epsp = dispersion(np.asarray(k, dtype=float), params), \
        dispersion(np.asarray(kp, dtype=float), params)
    den = bs3.B - eps - epsp
    if np.any(np.abs(den) < shell_tol * params.J):
        raise ShellTouching(
            f"B_s - eps - eps' reaches {np.min(np.abs(den))} on the grid")
    ek = eta_e_momentum(np.atleast_1d(k), bs3, params)
    ekp = eta_e_momentum(np.atleast_1d(kp), bs3, params)
    out = params.V * (ek + ekp) / (2.0 * np.sqrt(2.0 * np.pi) * den)
    return out if np.asarray(k).ndim else complex(np.asarray(out).ravel()[0])


def _norm_integrals(beta: float, s: int, params: ModelParams, n: int):
    """1/N^2 on a uniform n-point zone grid (trapezoid)."""
    bs3 = BoundState3(s=s, beta=beta, B=solve_single_bound_states(params)[s - 1].E
                      + beta, norm=1.0)
    k = np.linspace(-np.pi, np.pi, n)
    ek = np.asarray(eta_e_momentum(k, bs3, params))
    one = np.trapezoid(np.abs(ek) ** 2, k)
    eps = dispersion(k, params)
    den = bs3.B - eps[:, None] - eps[None, :]
    eta2 = params.V * (ek[:, None] + ek[None, :]) / (2.0 * np.sqrt(2.0 * np.pi) * den)
    inner = np.trapezoid(np.abs(eta2) ** 2, k, axis=1)
    two = np.trapezoid(inner, k)
    return one + 2.0 * two


def _normalization(beta: float, s: int, params: ModelParams,
                   n: int = NORM_GRID) -> float:
    """N by zone quadrature, Richardson-refined from n and 2n grids."""
    c1 = _norm_integrals(beta, s, params, n + 1)
    c2 = _norm_integrals(beta, s, params, 2 * n + 1)
    # trapezoid error ~ h^2
    val = c2 + (c2 - c1) / 3.0
    return float(1.0 / np.sqrt(val))


def decay_rate(bs3: BoundState3, params: ModelParams) -> float:
    """Exponential decay rate kappa of eta_e(x): |eta_e|^2 ~ exp(-2 kappa |x|).

    From the complex-momentum pole of (beta - eps_k)^-1: cos k_* =
    (omega0 - beta) / 2J with |cos k_*| > 1 outside the band.
    """
    return float(np.arccosh(abs(params.omega0 - bs3.beta) / (2.0 * params.J)))
