"""Default tolerances, bundled so callers can override them together."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    activity: float = 1e-8  # |F| <= activity marks a component active
    zero: float = 1e-9  # |lambda| <= zero counts as a vanishing multiplier
    w: float = 1e-8  # stationarity residual bound
    eig: float = 1e-8  # relative eigenvalue threshold for QI and ND3

    def __post_init__(self):
        for name in ("activity", "zero", "w", "eig"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be positive")


DEFAULT = Tolerances()
