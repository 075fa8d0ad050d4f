"""Photon self-energy, dressed Green's function, and single-photon bound states.

The self-energy of the TLS dressed by the cosine band,

    Sigma(w) = V^2 (2 pi)^-1 Int dk / (w - eps_k),

has the closed form V^2 / sqrt((w - omega0)^2 - 4 J^2) on the physical
(retarded) sheet: the square root is taken continuous from the upper half
plane, with branch cuts along the band [eps_min, eps_max].  Real arguments
are interpreted as the boundary value from above (the +i0+ prescription),
so inside the band Sigma_+(x) = -i V^2 / sqrt(4 J^2 - (x - omega0)^2).

G(w) = 1 / (w - Omega - Sigma(w)) has two real poles E_1 < eps_min and
E_2 > eps_max for any V > 0; their residues are Z_s = 1 / (1 - Sigma'(E_s)).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .band import ModelParams, band_edges, dispersion
from .errors import BandEdgeSingularity, PoleHit, RootNotBracketed

POLE_TOL = 1e-12


@dataclass(frozen=True)
class ComplexEnergy:
    """Energy argument with an explicit +i0+ boundary flag.

    ``boundary=True`` is only meaningful for im == 0 and means the
    evaluation is the limit eta -> 0+ of F(re + i eta).
    """

    re: float
    im: float = 0.0
    boundary: bool = True

    def __post_init__(self):
        if self.boundary and self.im != 0.0:
            raise ValueError("boundary flag requires im == 0")

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


@dataclass(frozen=True)
class BoundState1:
    """Single-photon bound state: index s in {1, 2}, energy E, residue Z."""

    s: int
    E: float
    Z: float


def _as_complex(w):
    if isinstance(w, ComplexEnergy):
        return w.value
    return complex(w)


def _branch_sqrt(z: complex, params: ModelParams) -> complex:
    """sqrt((w - omega0)^2 - 4 J^2) on the physical sheet.

    Product of principal square roots sqrt(z - 2J) sqrt(z + 2J) with
    z = w - omega0: analytic off the band, Schwarz-reflection symmetric,
    and ~ z at large |z|.  Real z is taken as z + i0+.
    """
    z = z - params.omega0
    twoJ = 2.0 * params.J
    if z.imag == 0.0:
        # boundary value from above
        z = complex(z.real, 0.0)
        s = np.sqrt(complex(z.real - twoJ, +0.0)) * np.sqrt(complex(z.real + twoJ, +0.0))
        return complex(s)
    return complex(np.sqrt(z - twoJ) * np.sqrt(z + twoJ))


def self_energy(w, params: ModelParams) -> complex:
    """Sigma(w) = V^2 / sqrt((w - omega0)^2 - 4 J^2) on the retarded branch.

    Real w is evaluated as w + i0+; inside the band this gives the purely
    imaginary Sigma_+(w) = -i V^2 / sqrt(4 J^2 - (w - omega0)^2).

    Raises
    ------
    BandEdgeSingularity
        For w within tolerance of a band edge on the real axis.
    """
    w = _as_complex(w)
    lo, hi = band_edges(params)
    if w.imag == 0.0 and (abs(w.real - lo) <= params.edge_tol
                          or abs(w.real - hi) <= params.edge_tol):
        raise BandEdgeSingularity(f"Sigma singular at band edge, w={w.real}")
    return params.V ** 2 / _branch_sqrt(w, params)


def self_energy_prime(w, params: ModelParams) -> complex:
    """d Sigma / d w on the same branch as ``self_energy``."""
    w = _as_complex(w)
    s = _branch_sqrt(w, params)
    return -params.V ** 2 * (w - params.omega0) / s ** 3


def self_energy_quadrature(w, params: ModelParams, epsabs=1e-13, epsrel=1e-12) -> complex:
    """Direct quadrature of the defining integral, for validation.

    Requires Im w != 0 (the integrand is then smooth over the zone).
    """
    w = _as_complex(w)
    if w.imag == 0.0:
        raise ValueError("quadrature route needs Im w != 0; use eta-extrapolation")

    def f(k):
        return 1.0 / (w - dispersion(k, params))

    val, _ = quad(f, -np.pi, np.pi, complex_func=True,
                  epsabs=epsabs, epsrel=epsrel, limit=200)
    return params.V ** 2 * val / (2.0 * np.pi)


def inverse_greens(w, params: ModelParams) -> complex:
    """G^-1(w) = w - Omega - Sigma(w)."""
    w = _as_complex(w)
    if params.V == 0.0:
        return w - params.Omega
    return w - params.Omega - self_energy(w, params)


def greens_fn(w, params: ModelParams) -> complex:
    """Dressed Green's function G(w) = [w - Omega - Sigma(w)]^-1.

    Raises
    ------
    PoleHit
        If |G^-1| falls below tolerance (use residue machinery instead).
    """
    ginv = inverse_greens(w, params)
    if abs(ginv) < POLE_TOL * params.J:
        raise PoleHit(f"G^-1 vanishes at w={w}")
    return 1.0 / ginv


def im_greens_plus(eps, params: ModelParams):
    """Im G_+(eps) for real eps inside the band, from the closed-form Sigma_+.

    Vectorized over ``eps``.  Inside the band Sigma_+ = -i Gamma with
    Gamma = V^2 / sqrt(4 J^2 - (eps - omega0)^2), so
    Im G_+ = -Gamma / ((eps - Omega)^2 + Gamma^2) < 0.
    """
    eps = np.asarray(eps, dtype=float)
    gamma = params.V ** 2 / np.sqrt(4.0 * params.J ** 2 - (eps - params.omega0) ** 2)
    return -gamma / ((eps - params.Omega) ** 2 + gamma ** 2)


def greens_plus_band(eps, params: ModelParams):
    """G_+(eps) for real eps strictly inside the band, vectorized."""
    eps = np.asarray(eps, dtype=float)
    gamma = params.V ** 2 / np.sqrt(4.0 * params.J ** 2 - (eps - params.omega0) ** 2)
    return 1.0 / ((eps - params.Omega) + 1j * gamma)


def residue_z(E: float, params: ModelParams) -> float:
    """Bound-state residue Z = 1 / (1 - Sigma'(E)) for real E outside the band."""
    return float(1.0 / (1.0 - self_energy_prime(E, params).real))


def residue_z_integral(E: float, params: ModelParams) -> float:
    """Z from the defining integral Z^-1 = 1 + V^2 (2 pi)^-1 Int dk (E - eps_k)^-2."""

    def f(k):
        return 1.0 / (E - dispersion(k, params)) ** 2

    val, _ = quad(f, -np.pi, np.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(1.0 / (1.0 + params.V ** 2 * val / (2.0 * np.pi)))


@functools.lru_cache(maxsize=256)
def solve_single_bound_states(params: ModelParams) -> tuple:
    """Both real roots of G^-1 = 0: E_1 below the band, E_2 above.

    Brackets start a tolerance inside the near edge (where G^-1 -> +/-inf)
    and expand geometrically on the far side until a sign change.

    Raises
    ------
    RootNotBracketed
        If the geometric expansion exceeds its configured range (cannot
        occur for V > 0 with the cosine band; asserted as an invariant).
    """
    if params.V <= 0.0:
        raise ValueError("bound states require V > 0")
    lo, hi = band_edges(params)

    def ginv(w):
        return inverse_greens(w, params).real

    states = []
    for s, edge, direction in ((1, lo, -1.0), (2, hi, +1.0)):
        near = edge + direction * max(10 * params.edge_tol, 1e-8 * params.J)
        step = params.J
        far = near + direction * step
        f_near = ginv(near)
        for _ in range(200):
            if f_near * ginv(far) < 0.0:
                break
            step *= 2.0
            far = near + direction * step
        else:
            raise RootNotBracketed(f"no sign change for E_{s}")
        a, b = sorted((near, far))
        E = brentq(ginv, a, b, xtol=1e-15, rtol=1e-14)
        states.append(BoundState1(s=s, E=float(E), Z=residue_z(E, params)))
    return tuple(states)


def bound_state(s: int, params: ModelParams) -> BoundState1:
    """Convenience accessor for the s-th bound state (s in {1, 2})."""
    return solve_single_bound_states(params)[s - 1]
