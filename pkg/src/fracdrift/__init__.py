"""Green's kernel of (-Delta)^s + b d/dx_n and its supporting numerics."""

__version__ = "0.1.0"

from .config import NORMALIZATION, KernelParams, QuadratureConfig, RadialPoint  # noqa: E402
from .errors import (ChartRangeError, CompatibilityError, ConvergenceError,  # noqa: E402
                     DegenerateFieldError, DomainError, FitError, FracDriftError,
                     NearSingularError, NumericalError, PrecisionError, StepFailure)

__all__ = [
    "__version__", "NORMALIZATION", "KernelParams", "QuadratureConfig", "RadialPoint",
    "FracDriftError", "DomainError", "CompatibilityError", "ChartRangeError", "NumericalError",
    "ConvergenceError", "PrecisionError", "FitError", "DegenerateFieldError", "StepFailure",
    "NearSingularError",
]
