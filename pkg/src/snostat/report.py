"""Full classification of a single feasible point."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .morse import (
    LagrangeData,
    MorseReport,
    biactive_index,
    lagrange_data,
    morse_verdict,
    nondegeneracy,
    quadratic_index,
)
from .problem import ActivePattern, ConeKind, SnoProblem, active_pattern
from .stationarity import (
    LicqReport,
    MultiplierSet,
    NotionFlags,
    SaddleClass,
    c_stationarity_check,
    classify_notions,
    classify_saddle,
    licq,
    solve_multipliers,
)
from .tolerances import DEFAULT, Tolerances


@dataclass(frozen=True)
class StationarityReport:
    point: tuple[float, ...]
    value: float
    pattern: ActivePattern
    licq: LicqReport
    multipliers: MultiplierSet
    flags: NotionFlags
    c_stationary: Optional[bool]
    saddle: SaddleClass
    lagrange: LagrangeData
    morse: MorseReport

    def to_dict(self) -> dict:
        f = self.flags
        return {
            "point": list(self.point),
            "value": self.value,
            "residual": self.multipliers.residual,
            "multipliers": self.multipliers.as_rows(),
            "biactive": [i + 1 for i in self.pattern.biactive],
            "licq": self.licq.holds,
            "flags": {
                "W": f.w,
                "Nhat": f.frechet_hat,
                "N": f.limiting,
                "Nbar": f.clarke_bar,
                "T": f.t_stationary,
                "C": self.c_stationary,
            },
            "saddle": {
                "perIndex": {str(i + 1): lab.value for i, lab in self.saddle.per_index.items()},
                "firstOrder": self.saddle.is_first_order_saddle,
                "singular": self.saddle.is_singular,
                "regular": self.saddle.is_regular,
            },
            "QI": self.morse.qi,
            "BI": self.morse.bi,
            "TI": self.morse.ti,
            "ND": [self.morse.nd1, self.morse.nd2, self.morse.nd3],
            "verdict": self.morse.verdict.value,
        }


def analyze_point(p: SnoProblem, x, tols: Tolerances = DEFAULT) -> StationarityReport:
    """Classify ``x`` against every notion and compute its Morse data.

    Raises InfeasiblePointError for infeasible ``x`` and LicqError when the
    active gradients are linearly dependent.
    """
    x = [float(v) for v in x]
    if len(x) != p.n:
        raise ValueError(f"point has dimension {len(x)}, problem has {p.n}")
    pattern = active_pattern(p, x, tols.activity)
    lic = licq(p, x, tols.activity, pattern)
    ms = solve_multipliers(p, x, tols.activity, pattern)
    flags = classify_notions(ms, pattern, p.cone, tols.zero, tols.w)
    saddle = classify_saddle(ms, pattern, p.cone, tols.zero, tols.w)
    c_stat = None
    if p.cone in (ConeKind.COMPLEMENTARITY, ConeKind.DISJUNCTIVE):
        c_stat = c_stationarity_check(p, x, ms, pattern, tols.zero, tols.w, tols.activity)
    lag = lagrange_data(p, x, ms, pattern, tols.activity, tols.zero)
    qi, _ = quadratic_index(lag.restricted_hessian, tols.eig)
    bi = biactive_index(ms, pattern, p.cone, tols.zero)
    nd = nondegeneracy(p, x, ms, lag, pattern, tols.activity, tols.zero, tols.eig)
    return StationarityReport(
        point=tuple(x),
        value=p.f(x),
        pattern=pattern,
        licq=lic,
        multipliers=ms,
        flags=flags,
        c_stationary=c_stat,
        saddle=saddle,
        lagrange=lag,
        morse=morse_verdict(flags, nd, qi, bi),
    )
