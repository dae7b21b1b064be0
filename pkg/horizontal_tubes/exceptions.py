class TubeError(Exception):
    """Base class for every error raised by horizontal_tubes."""


class DomainError(TubeError, ValueError):
    """Inputs lie outside the region where a formula is defined."""


class SupercriticalViolationError(DomainError):
    """The mean curvature is not supercritical, i.e. 4H²+κ ≤ 0."""


class NonpositiveHError(DomainError):
    """A closed form needs H > 0."""


class InvalidPointError(DomainError):
    """A point does not belong to the chart it claims to be in."""


class ModelMismatchError(DomainError):
    """The ambient model does not fit the parameters or the operation."""


class DomainViolationError(DomainError):
    """A radicand, a denominator or a tangent argument left its domain."""


class DegenerateTangencyError(DomainError):
    """The parametrization is not immersive at the requested point."""


class DegenerateProjectionError(DomainError):
    """The projection of a sister curve is singular (sin θ = 0)."""


class DegenerateCaseError(DomainError):
    """The parameters sit on a degenerate case with no closed formula."""


class NonToralSisterError(DomainError):
    """The sister space has κ ≤ 0, so the sister surface is not a torus."""


class UnscaledCurvatureError(DomainError):
    """Area and volume formulas are only stated at κ = 4."""


class NumericalError(TubeError, RuntimeError):
    """A numerical routine could not reach the requested accuracy."""


class StepFailureError(NumericalError):
    """The adaptive integrator failed."""


class QuadratureFailureError(NumericalError):
    """Adaptive quadrature failed to converge."""
