"""Cosine band of the coupled-resonator array.

Dispersion eps_k = omega0 - 2 J cos k on the first Brillouin zone
[-pi, pi], band edges omega0 -+ 2J, and the energy <-> momentum
inversion used by every on-shell sum.  All energies are dimensionless
multiples of a user-chosen unit (J = 1 in typical use); the inter-cavity
distance is 1 and hbar = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EnergyOutsideBand

# Energies within EDGE_TOL_FACTOR * J of a band edge are classified
# ``at_edge`` and rejected by shell operations (the group-velocity
# Jacobian vanishes there).
EDGE_TOL_FACTOR = 1e-9


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the TLS + resonator-array system.

    Parameters
    ----------
    omega0 : float
        Cavity eigenfrequency (band center).
    J : float
        Nearest-neighbor hopping constant, J > 0; band width is 4 J.
    V : float
        TLS-photon coupling at the TLS site, V >= 0.
    Omega : float
        TLS level spacing.
    """

    omega0: float
    J: float
    V: float
    Omega: float

    def __post_init__(self):
        if not np.isfinite([self.omega0, self.J, self.V, self.Omega]).all():
            raise ValueError("all model parameters must be finite")
        if self.J <= 0.0:
            raise ValueError(f"J must be positive, got {self.J}")
        if self.V < 0.0:
            raise ValueError(f"V must be non-negative, got {self.V}")

    @property
    def band_min(self) -> float:
        return self.omega0 - 2.0 * self.J

    @property
    def band_max(self) -> float:
        return self.omega0 + 2.0 * self.J

    @property
    def edge_tol(self) -> float:
        return EDGE_TOL_FACTOR * self.J


@dataclass(frozen=True)
class BandEnergy:
    """An energy together with its position relative to the band."""

    value: float
    classification: str  # below_band | in_band | above_band | at_edge


@dataclass(frozen=True)
class ShellPoint:
    """Solutions of eps_k = eps: the pair {+k, -k} and the shell Jacobian."""

    k: float                    # representative momentum in [0, pi]
    momenta: tuple              # (+k, -k)
    jacobian: float             # |d eps / d k| = 2 J |sin k|
    degenerate: bool            # True at a band edge (jacobian -> 0)


def band_edges(params: ModelParams) -> tuple:
    """Return (eps_min, eps_max) = (omega0 - 2J, omega0 + 2J)."""
    return params.band_min, params.band_max


def dispersion(k, params: ModelParams):
    """Photon dispersion eps_k = omega0 - 2 J cos k (even in k)."""
    return params.omega0 - 2.0 * params.J * np.cos(k)


def group_velocity(k, params: ModelParams):
    """d eps / d k = 2 J sin k."""
    return 2.0 * params.J * np.sin(k)


def classify_energy(eps: float, params: ModelParams) -> BandEnergy:
    """Classify an energy against the band under the edge tolerance."""
    lo, hi = band_edges(params)
    tol = params.edge_tol
    if abs(eps - lo) <= tol or abs(eps - hi) <= tol:
        cls = "at_edge"
    elif eps < lo:
        cls = "below_band"
    elif eps > hi:
        cls = "above_band"
    else:
        cls = "in_band"
    return BandEnergy(value=eps, classification=cls)


def in_band(eps: float, params: ModelParams) -> bool:
    """Strictly inside the open band, away from both edges."""
    return classify_energy(eps, params).classification == "in_band"


def momentum_at_energy(eps: float, params: ModelParams) -> float:
    """The non-negative momentum k in [0, pi] with eps_k = eps."""
    lo, hi = band_edges(params)
    if eps < lo - params.edge_tol or eps > hi + params.edge_tol:
        raise EnergyOutsideBand(
            f"eps={eps} outside band [{lo}, {hi}]")
    c = (params.omega0 - eps) / (2.0 * params.J)
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def momenta_at_energy(eps: float, params: ModelParams) -> ShellPoint:
    """Invert the dispersion: all momenta with eps_k = eps plus the Jacobian.

    Raises
    ------
    EnergyOutsideBand
        If eps lies outside [eps_min, eps_max] beyond tolerance.
    """
    k = momentum_at_energy(eps, params)
    jac = 2.0 * params.J * abs(np.sin(k))
    degenerate = classify_energy(eps, params).classification == "at_edge"
    return ShellPoint(k=k, momenta=(k, -k), jacobian=jac, degenerate=degenerate)
