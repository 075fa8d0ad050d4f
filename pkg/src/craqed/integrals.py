"""Principal-value band integrals of the two-photon formulas.

All +i0+ integrals over the band [eps_min, eps_max] reduce to a common
kernel: a smooth integrand with a small set of simple poles, each split
by Sokhotski-Plemelj into a principal value (computed by subtracting the
pole term) plus +/- i pi times the residue.  The retarded prescription on
the *first* argument of J(E, eps) = pi^-1 G(E) / (eps - E) puts every
pole of A_s, I and C on the (eps' - p - i0+) side, i.e. each contributes
+ i pi residue.

An independent eta-regularized route (finite imaginary shift, Richardson
extrapolated to eta -> 0) is provided for every quantity and used by the
test suite as the second leg of the dual-route checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .band import ModelParams, band_edges
from .errors import PoleAtEdge, QuadratureNotConverged, ThresholdDegenerate
from .greens import (greens_fn, greens_plus_band, im_greens_plus,
                     solve_single_bound_states)

QUAD_EPSABS = 1e-11
QUAD_EPSREL = 1e-11
QUAD_LIMIT = 400

# eta ladder for the regularized route (Richardson-extrapolated to 0).
ETA_SEQUENCE = (1e-3, 5e-4, 2.5e-4)


@dataclass(frozen=True)
class PoleSpec:
    """A simple pole of a band integrand.

    ``sign=+1`` adds +i pi * residue (prescription 1/(x - p - i0+)),
    ``sign=-1`` adds -i pi * residue (prescription 1/(x - p + i0+)).
    """

    location: float
    residue: complex
    sign: int = +1


@dataclass(frozen=True)
class TwoPhotonConstants:
    """Constants of the two-photon-in sector at total energy E3.

    ``degenerate`` marks the measure-zero configuration E3 = E_1 + E_2
    where the pole sum diverges; A is then complex infinity and every
    amplitude proportional to 1/A vanishes.
    """

    E3: float
    C: complex
    A: complex
    degenerate: bool = False


def _g_plus(w, params):
    """G_+(w) for real w: closed form in band, direct evaluation outside."""
    lo, hi = band_edges(params)
    if lo + params.edge_tol < w < hi - params.edge_tol:
        return complex(greens_plus_band(w, params))
    return greens_fn(w, params)


def pv_band_integral(f, poles, params: ModelParams, breakpoints=(),
                     epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL) -> complex:
    """Integrate f over the band with declared simple poles under +i0+.

    Parameters
    ----------
    f : callable
        Integrand evaluated at real energies inside the band (away from
        the declared pole locations).
    poles : sequence of PoleSpec
        Simple poles of f.  Poles outside the band are ignored (f is
        then smooth over the band and integrated directly).
    breakpoints : sequence of float
        Additional subdivision points (e.g. square-root branch points of
        G_+ mapped into the band).

    Raises
    ------
    PoleAtEdge
        If a declared pole sits within tolerance of a band edge.
    QuadratureNotConverged
        If the adaptive quadrature reports a large error estimate.
    """
    a, b = band_edges(params)
    tol = max(params.edge_tol, 1e-9 * params.J)
    inside = []
    for p in poles:
        if a + tol < p.location < b - tol:
            inside.append(p)
        elif abs(p.location - a) <= tol or abs(p.location - b) <= tol:
            raise PoleAtEdge(f"pole at {p.location} within tolerance of a band edge")

    def f_sub(x):
        val = f(x)
        for p in inside:
            val = val - p.residue / (x - p.location)
        return val

    points = sorted({float(x) for x in list(breakpoints) + [p.location for p in inside]
                     if a + tol < x < b - tol})
    val, err = quad(f_sub, a, b, points=points or None, complex_func=True,
                    epsabs=epsabs, epsrel=epsrel, limit=QUAD_LIMIT)
    if abs(err) > 1e3 * (epsabs + epsrel * abs(val)) + 1e-8:
        raise QuadratureNotConverged(f"error estimate {err} for value {val}")

    for p in inside:
        val += p.residue * np.log((b - p.location) / (p.location - a))
        val += p.sign * 1j * np.pi * p.residue
    return complex(val)


def _a_s_pieces(eps0: float, s: int, params: ModelParams):
    """Shared data for A_s at fixed eps0: bound states and E^(s) = E_s + eps0."""
    bs = solve_single_bound_states(params)
    b_s, b_sb = bs[s - 1], bs[2 - s]
    return b_s, b_sb, b_s.E + eps0


def a_s(eps: float, eps0: float, s: int, params: ModelParams) -> complex:
    """The amplitude A_s(eps, eps0) of the photon + bound-state sector.

    Discrete term through the other bound state plus the band integral
    with kernel J_+(E^(s) - eps', eps) (eps' - E_s) Im G_+(eps'), where
    E^(s) = E_s + eps0.

    Raises
    ------
    ThresholdDegenerate
        If E^(s) - E_sbar falls at a band edge, or a discrete denominator
        vanishes.
    """
    b_s, b_sb, e_tot = _a_s_pieces(eps0, s, params)
    a, b = band_edges(params)
    tol = max(params.edge_tol, 1e-12 * params.J)

    arg_disc = e_tot - b_sb.E
    if abs(arg_disc - a) <= tol or abs(arg_disc - b) <= tol:
        raise ThresholdDegenerate(f"E^(s) - E_sbar = {arg_disc} at a band edge")
    den_disc = e_tot - b_sb.E - eps
    if abs(den_disc) <= tol:
        raise ThresholdDegenerate("discrete-term denominator vanishes")
    discrete = b_sb.Z * (b_sb.E - b_s.E) * _g_plus(arg_disc, params) / den_disc

    q = e_tot - eps          # J_+ pole location in eps'
    p_s = e_tot - b_s.E      # = eps0: G pole through E_s
    p_sb = e_tot - b_sb.E    # G pole through E_sbar

    def integrand(x):
        g = greens_fn(e_tot - x + 0j, params) if not (a < e_tot - x < b) \
            else complex(greens_plus_band(e_tot - x, params))
        return g * (x - b_s.E) * float(im_greens_plus(x, params)) / ((x - q) * np.pi)

    poles = []
    if a + tol < q < b - tol:
        poles.append(PoleSpec(q, _g_plus(eps, params) * (q - b_s.E)
                              * float(im_greens_plus(q, params)) / np.pi))
    for loc, bstate in ((p_s, b_s), (p_sb, b_sb)):
        if a + tol < loc < b - tol:
            res = -bstate.Z * (loc - b_s.E) * float(im_greens_plus(loc, params)) \
                / ((loc - q) * np.pi)
            poles.append(PoleSpec(loc, res))

    # square-root branch points of G_+(E^(s) - eps') mapped into the band
    breaks = [x for x in (e_tot - a, e_tot - b) if a < x < b]
    integral = pv_band_integral(integrand, poles, params, breakpoints=breaks)
    return discrete + integral


def a_s_eta(eps: float, eps0: float, s: int, params: ModelParams,
            etas=ETA_SEQUENCE) -> complex:
    """Independent route for A_s: finite +i eta shift, extrapolated to eta -> 0."""
    b_s, b_sb, e_tot = _a_s_pieces(eps0, s, params)
    a, b = band_edges(params)

    vals = []
    for eta in etas:
        shift = e_tot + 1j * eta
        discrete = b_sb.Z * (b_sb.E - b_s.E) * greens_fn(shift - b_sb.E, params) \
            / (shift - b_sb.E - eps)

        def f2(x):
            g = greens_fn(shift - x, params)
            return g * (x - b_s.E) * float(im_greens_plus(x, params)) \
                / ((x - (e_tot - eps) - 1j * eta) * np.pi)

        pts = sorted({float(p) for p in (e_tot - a, e_tot - b, e_tot - eps,
                                         eps0, e_tot - b_sb.E)
                      if a < p < b})
        val, _ = quad(f2, a, b, points=pts or None, complex_func=True,
                      epsabs=1e-12, epsrel=1e-12, limit=800)
        vals.append(discrete + val)
    return _richardson(etas, vals)


def _richardson(etas, vals) -> complex:
    """Fit val = v0 + c1 eta + c2 eta^2 and return v0."""
    A = np.vander(np.asarray(etas, dtype=float), N=len(etas), increasing=True)
    coef = np.linalg.solve(A, np.asarray(vals, dtype=complex))
    return complex(coef[0])


def two_photon_constants(eps1: float, eps2: float, params: ModelParams) -> TwoPhotonConstants:
    """E^(3) = eps1 + eps2, C = pi^-1 Int G_+(E3 - eps') Im G_+(eps') d eps',
    and A = C - sum_s Z_s G_+(E3 - E_s)."""
    bs = solve_single_bound_states(params)
    a, b = band_edges(params)
    tol = max(params.edge_tol, 1e-12 * params.J)
    e3 = eps1 + eps2

    def integrand(x):
        g = greens_fn(e3 - x + 0j, params) if not (a < e3 - x < b) \
            else complex(greens_plus_band(e3 - x, params))
        return g * float(im_greens_plus(x, params)) / np.pi

    poles = []
    for st in bs:
        loc = e3 - st.E
        if a + tol < loc < b - tol:
            poles.append(PoleSpec(loc, -st.Z * float(im_greens_plus(loc, params)) / np.pi))
    breaks = [x for x in (e3 - a, e3 - b) if a < x < b]
    C = pv_band_integral(integrand, poles, params, breakpoints=breaks)

    # E3 = E_1 + E_2 makes G_+(E3 - E_s) hit the other bound-state pole:
    # A diverges and 1/A-weighted amplitudes vanish.
    if abs(e3 - bs[0].E - bs[1].E) <= 1e-8 * params.J:
        return TwoPhotonConstants(E3=e3, C=C, A=complex(np.inf, np.inf),
                                  degenerate=True)
    A = C
    for st in bs:
        arg = e3 - st.E
        if abs(arg - a) <= tol or abs(arg - b) <= tol:
            raise ThresholdDegenerate(f"E3 - E_{st.s} = {arg} at a band edge")
        A = A - st.Z * _g_plus(arg, params)
    return TwoPhotonConstants(E3=e3, C=C, A=A)


def c_eta(eps1: float, eps2: float, params: ModelParams, etas=ETA_SEQUENCE) -> complex:
    """Eta-regularized route for the constant C."""
    a, b = band_edges(params)
    e3 = eps1 + eps2
    bs = solve_single_bound_states(params)
    vals = []
    for eta in etas:
        def f(x):
            return greens_fn(e3 + 1j * eta - x, params) \
                * float(im_greens_plus(x, params)) / np.pi

        pts = sorted({float(p) for p in (e3 - a, e3 - b, e3 - bs[0].E, e3 - bs[1].E)
                      if a < p < b})
        val, _ = quad(f, a, b, points=pts or None, complex_func=True,
                      epsabs=1e-12, epsrel=1e-12, limit=800)
        vals.append(val)
    return _richardson(etas, vals)


def i_fun(eps: float, consts: TwoPhotonConstants, params: ModelParams) -> complex:
    """I(eps): two-pole sum over the bound states plus the band integral
    with kernel J_+(E3 - eps', eps) Im G_+(eps')."""
    bs = solve_single_bound_states(params)
    a, b = band_edges(params)
    tol = max(params.edge_tol, 1e-12 * params.J)
    e3 = consts.E3

    discrete = 0.0 + 0.0j
    for st in bs:
        den = e3 - st.E - eps
        if abs(den) <= tol:
            raise ThresholdDegenerate("I(eps) discrete denominator vanishes")
        discrete += st.Z * _g_plus(e3 - st.E, params) / den

    q = e3 - eps

    def integrand(x):
        g = greens_fn(e3 - x + 0j, params) if not (a < e3 - x < b) \
            else complex(greens_plus_band(e3 - x, params))
        return g * float(im_greens_plus(x, params)) / ((x - q) * np.pi)

    poles = []
    if a + tol < q < b - tol:
        poles.append(PoleSpec(q, _g_plus(eps, params)
                              * float(im_greens_plus(q, params)) / np.pi))
    for st in bs:
        loc = e3 - st.E
        if a + tol < loc < b - tol:
            poles.append(PoleSpec(loc, -st.Z * float(im_greens_plus(loc, params))
                                  / ((loc - q) * np.pi)))
    breaks = [x for x in (e3 - a, e3 - b) if a < x < b]
    return discrete + pv_band_integral(integrand, poles, params, breakpoints=breaks)


def i_fun_eta(eps: float, consts: TwoPhotonConstants, params: ModelParams,
              etas=ETA_SEQUENCE) -> complex:
    """Eta-regularized route for I(eps)."""
    bs = solve_single_bound_states(params)
    a, b = band_edges(params)
    e3 = consts.E3
    vals = []
    for eta in etas:
        shift = e3 + 1j * eta
        discrete = sum(st.Z * greens_fn(shift - st.E, params) / (shift - st.E - eps)
                       for st in bs)

        def f(x):
            return greens_fn(shift - x, params) * float(im_greens_plus(x, params)) \
                / ((x - (e3 - eps) - 1j * eta) * np.pi)

        pts = sorted({float(p) for p in (e3 - a, e3 - b, e3 - eps,
                                         e3 - bs[0].E, e3 - bs[1].E)
                      if a < p < b})
        val, _ = quad(f, a, b, points=pts or None, complex_func=True,
                      epsabs=1e-12, epsrel=1e-12, limit=800)
        vals.append(discrete + val)
    return _richardson(etas, vals)


def phi_fun(eps: float, eps1: float, eps2: float,
            consts: TwoPhotonConstants, params: ModelParams) -> complex:
    """phi(eps) = 2 I(eps)/A - sum_i (eps - eps_i)^-1."""
    val = 2.0 * i_fun(eps, consts, params) / consts.A
    for ei in (eps1, eps2):
        val -= 1.0 / (eps - ei)
    return val


# ---------------------------------------------------------------------------
# Smooth fast path: A_s(eps, eps0) for eps0 outside the band (three-body
# sector).  There the J_+ pole and both G poles fall outside the band, so
# the integrand is smooth and a fixed Chebyshev-substituted Gauss rule
# converges spectrally; the whole family over eps shares one set of nodes.
# ---------------------------------------------------------------------------

def _cheb_band_nodes(params: ModelParams, n: int):
    """Gauss-Legendre nodes in phi with eps' = c + h sin(phi): absorbs the
    sqrt vanishing of Im G_+ at both band edges."""
    a, b = band_edges(params)
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    t, w = np.polynomial.legendre.leggauss(n)
    phi = 0.5 * np.pi * t
    x = c + h * np.sin(phi)
    wts = w * 0.5 * np.pi * h * np.cos(phi)
    return x, wts


def a_s_family(eps_values, eps0: float, s: int, params: ModelParams,
               n_nodes: int = 512):
    """Vectorized A_s(eps, eps0) for an array of probe energies.

    Valid only when E^(s) = E_s + eps0 puts every pole and branch point
    outside the band (always the case in the three-body sector, where
    eps0 = beta_s lies outside the band); checked and enforced.
    """
    bs = solve_single_bound_states(params)
    b_s, b_sb = bs[s - 1], bs[2 - s]
    e_tot = b_s.E + eps0
    a, b = band_edges(params)

    eps_values = np.atleast_1d(np.asarray(eps_values, dtype=float))
    q = e_tot - eps_values
    if np.any((q > a - 10 * params.edge_tol) & (q < b + 10 * params.edge_tol)):
        raise ValueError("a_s_family: J_+ pole inside the band; use a_s")
    for loc in (e_tot - b_s.E, e_tot - b_sb.E, e_tot - a, e_tot - b):
        if a - 10 * params.edge_tol < loc < b + 10 * params.edge_tol:
            raise ValueError("a_s_family: singularity inside the band; use a_s")

    x, w = _cheb_band_nodes(params, n_nodes)
    g_arg = e_tot - x  # entirely outside the band
    g = np.array([greens_fn(v + 0j, params) for v in g_arg])
    h = g * (x - b_s.E) * im_greens_plus(x, params) / np.pi
    integral = (h * w)[None, :] / (x[None, :] - q[:, None])
    integral = integral.sum(axis=1)

    discrete = b_sb.Z * (b_sb.E - b_s.E) * greens_fn(e_tot - b_sb.E + 0j, params) \
        / (e_tot - b_sb.E - eps_values)
    out = discrete + integral
    return out if out.size > 1 else complex(out[0])
