"""Exception hierarchy for craqed."""


class CraqedError(Exception):
    """Base class for all craqed errors."""


class EnergyOutsideBand(CraqedError):
    """Energy lies outside [eps_min, eps_max] beyond tolerance."""


class BandEdgeSingularity(CraqedError):
    """Evaluation requested exactly at a band edge, where the square-root
    branch point makes the self-energy singular."""


class PoleHit(CraqedError):
    """Green's function evaluated at (or too close to) a bound-state pole."""


class RootNotBracketed(CraqedError):
    """Bracket expansion failed to enclose a sign change."""


class PoleAtEdge(CraqedError):
    """A principal-value pole sits within tolerance of a band edge."""


class QuadratureNotConverged(CraqedError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class ThresholdDegenerate(CraqedError):
    """A discrete-term denominator falls at a band edge or vanishes."""


class EdgeMomentum(CraqedError):
    """Momentum with vanishing group velocity (band edge)."""


class DenominatorVanishing(CraqedError):
    """Z_s G - A_s denominator under tolerance: three-body resonance locus."""


class EmptyShell(CraqedError):
    """No outgoing momentum satisfies energy conservation."""


class ShellTouching(CraqedError):
    """A three-body state's pair denominator approaches the two-photon shell."""


class GridTooSmall(CraqedError):
    """Real-space grid does not capture the decay of a bound profile."""


class ConvergenceFailure(CraqedError):
    """Iterative eigensolver did not converge."""


class ConfigInvalid(CraqedError):
    """Scenario configuration failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"config field '{field}': {message}")
