from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

NORMALIZATION = "E_{s,b}(x) = int exp(i x.xi) dxi / (|xi|^{2s} + i b xi_n), no (2 pi)^{-n} factor"


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for every numerical integral in the package.

    ``acceleration`` selects the transformation applied to alternating panel
    sums ("euler" repeated averaging or "shanks" via Wynn's epsilon table).
    ``agree`` is the number of successive accelerated estimates that must
    agree before an oscillatory tail is truncated.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_depth: int = 30
    max_panels: int = 1 << 16
    block: int = 16
    acceleration: str = "euler"
    agree: int = 3
    gl_nodes: int = 16

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol < 0:
            raise DomainError("tolerances must be positive")
        if self.acceleration not in ("euler", "shanks"):
            raise DomainError(f"unknown acceleration {self.acceleration!r}")
        if self.agree < 2:
            raise DomainError("agree must be at least 2")

    def tol(self, scale: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(scale))


@dataclass(frozen=True)
class KernelParams:
    """The triple (s, b, n) for (-Delta)^s + b d/dx_n on R^n."""

    s: float
    b: float = 1.0
    n: int = 3

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise DomainError(f"s must lie in (0, 1), got {self.s}")
        if not self.b > 0.0:
            raise DomainError(f"b must be positive, got {self.b}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")

    @property
    def nu(self) -> float:
        """Bessel order (n - 3)/2 of the Hankel reduction over R^{n-1}."""
        return 0.5 * (self.n - 3)


@dataclass(frozen=True)
class RadialPoint:
    """A point of R^n reduced to (|x'|, x_n)."""

    rho: float
    xn: float

    def __post_init__(self):
        if self.rho < 0:
            raise DomainError("rho = |x'| must be nonnegative")

    @classmethod
    def from_cartesian(cls, x) -> "RadialPoint":
        x = [float(v) for v in x]
        return cls(math.sqrt(sum(v * v for v in x[:-1])), x[-1])
