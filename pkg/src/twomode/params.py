"""Physical parameters of the two lossy coupled modes and their PT regime."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ExceptionalPointError

__all__ = ["EP_RTOL", "ExceptionalPointError", "ModelParams", "Phase", "Regime"]

# |(|delta| - 2g)| <= EP_RTOL * g classifies the exceptional point
EP_RTOL = 1e-9


class Phase(enum.Enum):
    BELOW_EP = "BelowEP"
    AT_EP = "AtEP"
    ABOVE_EP = "AboveEP"


@dataclass(frozen=True)
class Regime:
    """PT phase together with its oscillation (or splitting) frequency."""

    tag: Phase
    omega: float


@dataclass(frozen=True)
class ModelParams:
    """Coupling ``g`` and loss rates ``gamma_a``, ``gamma_b``.

    ``gamma`` is the total loss and ``delta = gamma_b - gamma_a`` the loss
    imbalance.  ``g = 0`` is allowed and describes two independent decaying
    modes.
    """

    g: float
    gamma_a: float = 0.0
    gamma_b: float = 0.0

    def __post_init__(self):
        for name in ("g", "gamma_a", "gamma_b"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value}")
        if self.g < 0:
            raise ValueError(f"g must be non-negative, got {self.g}")
        if self.gamma_a < 0 or self.gamma_b < 0:
            raise ValueError(f"loss rates must be non-negative, got {self.gamma_a}, {self.gamma_b}")

    @property
    def gamma(self) -> float:
        return self.gamma_a + self.gamma_b

    @property
    def delta(self) -> float:
        return self.gamma_b - self.gamma_a

    @property
    def max_rate(self) -> float:
        return max(self.g, self.gamma_a, self.gamma_b)

    @property
    def ep_offset(self) -> float:
        """Signed distance ``|delta| - 2g`` from the exceptional point."""
        return abs(self.delta) - 2.0 * self.g

    @property
    def regime(self) -> Regime:
        off = self.ep_offset
        if abs(off) <= EP_RTOL * self.g:
            return Regime(Phase.AT_EP, 0.0)
        d2, g2 = self.delta**2, 4.0 * self.g**2
        if off < 0:
            return Regime(Phase.BELOW_EP, math.sqrt(g2 - d2))
        return Regime(Phase.ABOVE_EP, math.sqrt(d2 - g2))
