"""Exception types shared across the package."""


class CapabenchError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CapabenchError):
    """Bad or inconsistent run configuration."""


class BudgetExceeded(CapabenchError):
    """A grid or search would exceed its configured budget."""


class EmptyDomain(CapabenchError):
    """Domain discretization produced no interior node."""


class DisconnectedDomain(CapabenchError):
    """Interior node set splits into several components."""


class SolverDiverged(CapabenchError):
    """Iterative solver failed to reach its residual target."""


class NotConverged(CapabenchError):
    """Nonlinear iteration stopped early; carries the last iterate."""

    def __init__(self, message, last_result=None):
        super().__init__(message)
        self.last_result = last_result


class DegenerateCondenser(CapabenchError):
    """Condenser plates intersect or touch the boundary layer."""


class ZeroField(CapabenchError):
    """An operation received an identically zero field."""


class FlatField(ZeroField):
    """Level-set machinery received a field with max |u| = 0."""


class DegenerateLevels(CapabenchError):
    """A level set carries no gradient mass (plateau)."""


class DimensionUnsupported(CapabenchError):
    """Operation not implemented for this dimension."""


class UnsupportedCase(CapabenchError):
    """Closed-form value does not exist for these parameters."""


class ShapeUnsupported(CapabenchError):
    """Boundary-pair check supports the unit ball and unit disk only."""


class ResolutionTooCoarse(CapabenchError):
    """Grid spacing cannot resolve the requested geometry."""


class StarshapeFailed(CapabenchError):
    """Star-shape certificate found a segment leaving the domain."""

    def __init__(self, message, segment=None):
        super().__init__(message)
        self.segment = segment


class SpacingViolated(CapabenchError):
    """Sphere point placement fell outside the spacing band."""


class TrendViolated(CapabenchError):
    """Monotonicity assertion of a trend table failed."""


class SearchBudgetExceeded(CapabenchError):
    """Interval/ball search exceeded its evaluation budget."""


class QuadratureUnstable(CapabenchError):
    """Quadrature variance or refinement disagreement too large."""


class NonIntegrable(CapabenchError):
    """Integral diverges where convergence was required."""


class SchemaMismatch(CapabenchError):
    """Report files carry incompatible schema versions."""
