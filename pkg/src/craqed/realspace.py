"""Coordinate-space synthesis of outgoing wavefunctions and bound profiles.

Shell integrals collapse the energy delta of each two-photon element to a
single integral over the shell, taken in the energy variable with a
Chebyshev substitution that absorbs the inverse group velocities at the
shell endpoints.  All reduced amplitudes depend on momenta only through
their energies, so the four +- branch combinations fold into products of
cosines and each grid is assembled with two matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .band import ModelParams, band_edges, dispersion, in_band, momentum_at_energy
from .bound3 import BoundState3, eta_e_momentum
from .errors import GridTooSmall, ShellTouching
from .greens import greens_plus_band, solve_single_bound_states
from .integrals import two_photon_constants
from .smatrix import (_elastic_denominator, _shell_nodes, breakup_open,
                      fluorescence_reduced, single_photon_rt)

DEFAULT_SHELL_POINTS = 4096
DEFAULT_WINDOW = 30.0
DEFAULT_GRID_N = 241


@dataclass
class Grid2D:
    """Uniform real-space grid of complex wavefunction values."""

    x: np.ndarray                 # shared axis, length n
    values: np.ndarray            # (n, n) complex, values[i, j] at (x[i], x[j])
    shell_empty: bool = False

    @property
    def x_min(self) -> float:
        return float(self.x[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])

    @property
    def n(self) -> int:
        return len(self.x)


def grid_axis(x_min: float = -DEFAULT_WINDOW, x_max: float = DEFAULT_WINDOW,
              n: int = DEFAULT_GRID_N) -> np.ndarray:
    return np.linspace(x_min, x_max, n)


def _momentum_of_energy(eps, params):
    c = (params.omega0 - np.asarray(eps)) / (2.0 * params.J)
    return np.arccos(np.clip(c, -1.0, 1.0))


def _shell_grid(x: np.ndarray, e_tot: float, amp_of_energies,
                params: ModelParams, n_shell: int) -> np.ndarray:
    """(1/4pi) Int dp1 dp2 M delta(E - e1 - e2) (e^{ip1x1+ip2x2} + swap)
    folded to cosines; amp_of_energies(eps1, eps2) -> reduced amplitude."""
    nodes = _shell_nodes(e_tot, params, n_shell)
    if nodes is None:
        return np.zeros((len(x), len(x)), dtype=complex)
    eps1, wts = nodes
    eps2 = e_tot - eps1
    k1 = _momentum_of_energy(eps1, params)
    k2 = _momentum_of_energy(eps2, params)
    v1 = 2.0 * params.J * np.sin(k1)
    v2 = 2.0 * params.J * np.sin(k2)
    amp = amp_of_energies(eps1, eps2)
    # dp1 = deps1 / v1; the delta contributes 1/v2 per +- branch of p2;
    # branch sums fold into the cosine products below.
    coef = wts * amp / (v1 * v2)
    c1 = np.cos(np.outer(x, k1))          # (nx, nodes)
    c2 = np.cos(np.outer(x, k2))
    # sum_j coef_j [cos(k1 x_a) cos(k2 x_b) + cos(k2 x_a) cos(k1 x_b)]
    m = (c1 * coef) @ c2.T
    return (m + m.T) / np.pi


def breakup_wavefunction(k0: float, s: int, params: ModelParams,
                         x: np.ndarray | None = None,
                         n_shell: int = DEFAULT_SHELL_POINTS) -> Grid2D:
    """Outgoing two-photon wavefunction Phi_s(x1, x2) of the breakup channel.

    Returns the zero grid (flagged) when the channel is closed at eps0.
    """
    if x is None:
        x = grid_axis()
    eps0 = dispersion(k0, params)
    bs = solve_single_bound_states(params)[s - 1]
    e_tot = bs.E + eps0
    if not breakup_open(eps0, s, params):
        return Grid2D(x=x, values=np.zeros((len(x), len(x)), dtype=complex),
                      shell_empty=True)
    den = _elastic_denominator(eps0, s, params)[2]
    pref = 1j * params.V ** 3 / np.sqrt(np.pi) * np.sqrt(2.0 * bs.Z) \
        * complex(greens_plus_band(eps0, params)) / den

    def amp(eps1, eps2):
        return pref * greens_plus_band(eps1, params) \
            * greens_plus_band(eps2, params)

    vals = _shell_grid(x, e_tot, amp, params, n_shell)
    return Grid2D(x=x, values=vals)


def correlation_wavefunction(k1: float, k2: float, params: ModelParams,
                             x: np.ndarray | None = None,
                             n_shell: int = DEFAULT_SHELL_POINTS) -> Grid2D:
    """Outgoing wavefunction g(x1, x2) of the 2 gamma -> 2 gamma channel.

    The factorized part resolves analytically into plane-wave combinations
    of the single-photon t/r coefficients; the fluorescence part is a
    shell integral.  G(x1, x2) = |g|^2.
    """
    if x is None:
        x = grid_axis()
    eps1, eps2 = dispersion(k1, params), dispersion(k2, params)
    t1, r1 = single_photon_rt(abs(k1), params)
    t2, r2 = single_photon_rt(abs(k2), params)
    chi1 = t1 * np.exp(1j * k1 * x) + r1 * np.exp(-1j * k1 * x)
    chi2 = t2 * np.exp(1j * k2 * x) + r2 * np.exp(-1j * k2 * x)
    g = (np.outer(chi1, chi2) + np.outer(chi2, chi1)) / (2.0 * np.pi)

    consts = two_photon_constants(eps1, eps2, params)
    if np.isfinite(consts.A):
        pref = -1j * params.V ** 4 / (np.pi * consts.A) \
            * complex(greens_plus_band(eps1, params)) \
            * complex(greens_plus_band(eps2, params))

        def amp(ep1, ep2):
            return pref * greens_plus_band(ep1, params) \
                * greens_plus_band(ep2, params)

        g = g + _shell_grid(x, consts.E3, amp, params, n_shell)
    return Grid2D(x=x, values=g)


def correlation_slice(grid: Grid2D, x_c: float):
    """G(x_c, x_r) along the relative coordinate, interpolated from the grid.

    x1 = x_c - x_r/2, x2 = x_c + x_r/2; returns (x_r, G) for the x_r
    values representable on the grid axis.
    """
    x = grid.x
    gre = np.real(grid.values)
    gim = np.imag(grid.values)
    xr = np.linspace(2 * (x[0] + abs(x_c)) , 2 * (x[-1] - abs(x_c)), len(x))
    x1 = x_c - xr / 2.0
    x2 = x_c + xr / 2.0
    from scipy.interpolate import RegularGridInterpolator
    ire = RegularGridInterpolator((x, x), gre)
    iim = RegularGridInterpolator((x, x), gim)
    pts = np.column_stack([x1, x2])
    g = ire(pts) + 1j * iim(pts)
    return xr, np.abs(g) ** 2


def bound3_realspace(bs3: BoundState3, params: ModelParams,
                     x: np.ndarray | None = None, n_k: int = 512,
                     boundary_fraction: float = 1e-3):
    """Coordinate profiles of a three-body bound state.

    Returns (|eta_e(x)|^2 on the 1-D axis, Grid2D of eta(x1, x2)), both
    normalized by N.

    Raises
    ------
    GridTooSmall
        If the boundary value of |eta_e|^2 exceeds ``boundary_fraction``
        of its peak (the decay is not captured by the window).
    """
    if x is None:
        x = grid_axis()
    t, w = np.polynomial.legendre.leggauss(n_k)
    k = 0.5 * np.pi * (t + 1.0)
    wk = 0.5 * np.pi * w
    ek = np.asarray(eta_e_momentum(k, bs3, params)) * bs3.norm

    cosx = np.cos(np.outer(x, k))          # (nx, nk)
    eta_e_x = np.sqrt(2.0 / np.pi) * cosx @ (wk * ek)
    prof = np.abs(eta_e_x) ** 2
    if prof.max() > 0 and max(prof[0], prof[-1]) > boundary_fraction * prof.max():
        raise GridTooSmall(
            "bound-state profile does not decay within the grid window")

    eps = dispersion(k, params)
    den = bs3.B - eps[:, None] - eps[None, :]
    if np.min(np.abs(den)) < 1e-9 * params.J:
        raise ShellTouching("B_s - eps - eps' vanishes on the momentum grid")
    eta2 = params.V * (ek[:, None] + ek[None, :]) \
        / (2.0 * np.sqrt(2.0 * np.pi) * den)
    # (1/2pi) Int dk dk' eta (e^{ikx1+ik'x2} + swap): even integrand folds
    # to cosines over the positive quarter-zone
    m = cosx @ ((wk[:, None] * wk[None, :]) * eta2) @ cosx.T
    vals = (m + m.T) * (2.0 / np.pi)
    return prof, Grid2D(x=x, values=vals)


def fit_decay_rate(x: np.ndarray, prof: np.ndarray,
                   window: tuple = (8.0, 20.0)) -> float:
    """Log-slope fit of |eta_e(x)|^2 ~ exp(-2 kappa |x|) over |x| in window.

    Sampled at integer lattice sites only: between sites the band-limited
    transform carries interpolation ripples that corrupt the slope.
    """
    on_site = np.isclose(x, np.round(x), atol=1e-9)
    mask = on_site & (x >= window[0]) & (x <= window[1]) & (prof > 0)
    slope = np.polyfit(x[mask], np.log(prof[mask]), 1)[0]
    return float(-slope / 2.0)
