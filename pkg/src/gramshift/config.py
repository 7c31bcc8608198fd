from __future__ import annotations

from dataclasses import dataclass

# Hard floor: below ~2*pi the main sum is empty and theta' changes sign.
ABSOLUTE_MIN_T = 10.0


class DomainError(ValueError):
    """Argument outside the region where the asymptotic formulas are used."""


@dataclass(frozen=True)
class RSConfig:
    """Truncation, correction and solver policy for the Riemann-Siegel evaluators.

    correction_order counts remainder terms kept after the main sum:
    0 (main sum only), 1 (C0), 2 (C0, C1), 3 (C0, C1, C2).
    """

    min_t: float = 50.0
    correction_order: int = 1
    newton_tol: float = 1e-10
    quad_order: int = 16

    def __post_init__(self) -> None:
        if not self.min_t >= ABSOLUTE_MIN_T:
            raise ValueError(f"min_t must be >= {ABSOLUTE_MIN_T}, got {self.min_t}")
        if self.correction_order not in (0, 1, 2, 3):
            raise ValueError(f"correction_order must be 0..3, got {self.correction_order}")
        if not self.newton_tol > 0:
            raise ValueError("newton_tol must be positive")
        if self.quad_order < 8:
            raise ValueError("quad_order must be >= 8")


DEFAULT_CONFIG = RSConfig()
