"""Exception hierarchy.

Every error raised by the package derives from :class:`MajorizeError`.
Validation failures are also ``ValueError`` so callers that only know about
the builtin hierarchy still catch them.
"""


class MajorizeError(Exception):
    """Base class for all package errors."""


class ValidationError(MajorizeError, ValueError):
    """Input failed a structural check."""


class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    def __init__(self, deviation: float, tol: float):
        super().__init__(f"max |A - A*| entry is {deviation:.3e} > tolerance {tol:.3e}")
        self.deviation = deviation
        self.tol = tol


class DimensionMismatch(ValidationError):
    pass


class NotCommuting(ValidationError):
    def __init__(self, pair: tuple[int, int], norm: float, tol: float):
        super().__init__(
            f"matrices {pair[0]} and {pair[1]} have commutator norm {norm:.3e} > {tol:.3e}"
        )
        self.pair = pair
        self.norm = norm
        self.tol = tol


class SpectrumOutsideDomain(ValidationError):
    def __init__(self, eigenvalue: float, interval: tuple[float, float]):
        super().__init__(f"eigenvalue {eigenvalue!r} lies outside the domain {interval!r}")
        self.eigenvalue = eigenvalue
        self.interval = interval


class DomainMismatch(ValidationError):
    pass


class ConvergenceFailure(MajorizeError):
    pass


class DegeneracyUnresolved(MajorizeError):
    def __init__(self, message: str, blocks: list[list[int]]):
        super().__init__(message)
        self.blocks = blocks


class NotUnital(ValidationError):
    pass


class PreconditionFailed(ValidationError):
    pass


class UnknownName(ValidationError):
    pass


class BadParameter(ValidationError):
    pass


class NotConvexClaim(ValidationError):
    pass


class BadDomain(ValidationError):
    pass


class NotDensity(ValidationError):
    pass


class Singular(ValidationError):
    pass


class BadExponents(ValidationError):
    pass


class NotPSD(ValidationError):
    pass


class HypothesisUnmet(MajorizeError):
    """Raised on request when a report was produced in exploratory mode."""


class InequalityViolation(MajorizeError):
    """Raised on request when an asserted inequality fails."""


class ParseError(ValidationError):
    pass


class UnknownTheorem(ValidationError):
    pass


class UnknownRepro(ValidationError):
    pass
