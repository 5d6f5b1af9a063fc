"""Exception hierarchy shared by every module.

The CLI maps :class:`DomainError` (and its subclasses) to exit status 2 and
every numerical failure to exit status 3.
"""


class FracDriftError(Exception):
    pass


class DomainError(FracDriftError, ValueError):
    """A parameter lies outside the validity window of an operation."""


class CompatibilityError(DomainError):
    """Forcing has a nonzero mean, which the constant-coefficient symbol cannot invert."""


class ChartRangeError(DomainError):
    pass


class NumericalError(FracDriftError, RuntimeError):
    pass


class ConvergenceError(NumericalError):
    pass


class PrecisionError(NumericalError):
    pass


class FitError(NumericalError):
    pass


class DegenerateFieldError(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class NearSingularError(NumericalError):
    pass
