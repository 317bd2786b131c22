"""Exception and warning types shared across the package."""


class FracdiffError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(FracdiffError):
    """A parameter lies outside the admissible range of an operation."""


class NonConvergentError(FracdiffError):
    """No evaluation branch met the requested tolerance.

    Carries the best available value and its error estimate so callers can
    decide whether to accept a degraded result.
    """

    def __init__(self, message, value=None, abs_error_estimate=None):
        super().__init__(message)
        self.value = value
        self.abs_error_estimate = abs_error_estimate


class SingularAtZeroError(FracdiffError):
    """Evaluation requested at t = 0 where the prefactor t**(zeta-1) blows up."""


class GridError(FracdiffError):
    """A time or space grid violates its structural requirements."""


class ResolutionError(FracdiffError):
    """The grid is too coarse for the requested accuracy."""


class PoleError(FracdiffError):
    """A power-rule stage is genuinely undefined (non-integrable exponent)."""


class TailError(FracdiffError):
    """A truncated improper integral cannot meet its tail bound."""


class BoundaryError(FracdiffError):
    """Space samples violate the homogeneous Dirichlet boundary conditions."""


class PreconditionError(FracdiffError):
    """Input data violate a documented hypothesis of the operation."""


class DenominatorUnderflowError(FracdiffError):
    """A modal denominator underflowed; signals an evaluator failure upstream."""


class MassBoundViolationError(FracdiffError):
    """The space integral of the known source factor is not bounded away from zero."""


class NoConvergenceError(FracdiffError):
    """Fixed-point iteration exhausted its iteration budget."""


class ContractionViolatedError(FracdiffError):
    """Successive fixed-point updates grew for several consecutive sweeps."""


class ParseError(FracdiffError):
    """A configuration document is not well formed."""


class ValidationError(FracdiffError):
    """A parsed configuration violates one or more invariants.

    ``violations`` lists every violated invariant, not just the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class TruncationWarning(UserWarning):
    """The retained mode set may be too small for the supplied data."""
