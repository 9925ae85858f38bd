"""Exception types shared across the package."""


class S5SurfError(Exception):
    """Base class for all package-specific errors."""


class DegenerateEllipse(S5SurfError):
    """The ellipse of curvature collapses to a segment or a point."""


class CircularEllipse(S5SurfError):
    """The ellipse of curvature is (numerically) a circle."""


class NonconstantQ(S5SurfError):
    """The quartic differential is not constant over the grid."""


class PositivityViolation(S5SurfError):
    """A quantity required to be positive is not."""


class SubstitutionDomain(S5SurfError):
    """The cosh substitution is requested outside its domain."""


class GramDrift(S5SurfError):
    """Integrated frame drifted too far from its target Gram matrix."""


class InadmissibleT(S5SurfError):
    """The lift parameter t lies outside the admissible interval."""


class StructureViolation(S5SurfError):
    """A structural identity of the lift frame failed."""

    def __init__(self, identity, residual, tolerance):
        self.identity = identity
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"{identity}: residual {residual:.3e} exceeds {tolerance:.3e}"
        )


class SequenceBreak(S5SurfError):
    """Sequence generation hit a degenerate entry; carries the index."""

    def __init__(self, index, cause):
        self.index = index
        self.cause = cause
        super().__init__(f"sequence stopped at p={index}: {cause}")
