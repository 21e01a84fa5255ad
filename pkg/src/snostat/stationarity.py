"""Multipliers and the stationarity notions W, N-hat, N, N-bar, T and C.

Multipliers follow the convention ``grad f = sum lam * grad F`` over active
components.  Every sign test works on the three-valued sign of a multiplier
(negative, zero within ``zero_tol``, positive), which keeps the notion tables
logically consistent with each other for values near zero.

The biactive sign tables per cone (``s1``, ``s2`` are multiplier signs):

==============  ====================  ============================  =================  ====================
cone            N-hat                 N                             N-bar              T
==============  ====================  ============================  =================  ====================
complementarity s1>=0, s2>=0          (s1>0, s2>0) or s1*s2=0       any                s1*s2>=0
vanishing       s1>=0, s2=0           s1*s2=0, s2<=0                s2<=0              s1*s2>=0, s2<=0
orthogonality   s1=0, s2>=0           s1*s2=0                       any                s1=0 or s2<=0
switching       s1=0, s2=0            s1*s2=0                       any                any
disjunctive     s1=0, s2=0            s1*s2=0, s1>=0, s2>=0         s1>=0, s2>=0       s1>=0, s2>=0
==============  ====================  ============================  =================  ====================

The last row belongs to the disjunctive cone (its normal cones at the origin
lie in the nonpositive quadrant); it is not a second vanishing row.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import expr as ex
from .errors import LicqError, UnsupportedConeError
from .linalg import lstsq_qr, numerical_rank
from .problem import (
    ActivePattern,
    ConeKind,
    Reduction,
    SnoProblem,
    active_pattern,
)
from .tolerances import DEFAULT

C, V, O, S, D = (
    ConeKind.COMPLEMENTARITY,
    ConeKind.VANISHING,
    ConeKind.ORTHOGONALITY,
    ConeKind.SWITCHING,
    ConeKind.DISJUNCTIVE,
)


def sign(value: float, zero_tol: float = DEFAULT.zero) -> int:
    if value > zero_tol:
        return 1
    if value < -zero_tol:
        return -1
    return 0


_FRECHET = {
    C: lambda s1, s2: s1 >= 0 and s2 >= 0,
    V: lambda s1, s2: s1 >= 0 and s2 == 0,
    O: lambda s1, s2: s1 == 0 and s2 >= 0,
    S: lambda s1, s2: s1 == 0 and s2 == 0,
    D: lambda s1, s2: s1 == 0 and s2 == 0,
}
_LIMITING = {
    C: lambda s1, s2: (s1 > 0 and s2 > 0) or s1 * s2 == 0,
    V: lambda s1, s2: s1 * s2 == 0 and s2 <= 0,
    O: lambda s1, s2: s1 * s2 == 0,
    S: lambda s1, s2: s1 * s2 == 0,
    D: lambda s1, s2: s1 * s2 == 0 and s1 >= 0 and s2 >= 0,
}
_CLARKE = {
    C: lambda s1, s2: True,
    V: lambda s1, s2: s2 <= 0,
    O: lambda s1, s2: True,
    S: lambda s1, s2: True,
    D: lambda s1, s2: s1 >= 0 and s2 >= 0,
}
_TOPOLOGICAL = {
    C: lambda s1, s2: s1 * s2 >= 0,
    V: lambda s1, s2: s1 * s2 >= 0 and s2 <= 0,
    O: lambda s1, s2: s1 == 0 or s2 <= 0,
    S: lambda s1, s2: True,
    D: lambda s1, s2: s1 >= 0 and s2 >= 0,
}
# Saddle points of first order: the pair lies in this region and is not (0, 0).
_SADDLE = {
    C: lambda s1, s2: s1 <= 0 and s2 <= 0,
    V: lambda s1, s2: s1 <= 0 and s2 <= 0,
    O: lambda s1, s2: s2 <= 0,
    S: lambda s1, s2: True,
    D: lambda s1, s2: s1 >= 0 and s2 >= 0,
}


@dataclass(frozen=True)
class LicqReport:
    holds: bool
    active_gradients: np.ndarray
    rank: int
    smallest_singular_value: float


@dataclass(frozen=True)
class MultiplierSet:
    """Multipliers per constraint; ``None`` marks an inactive component."""

    lam1: tuple[Optional[float], ...]
    lam2: tuple[Optional[float], ...]
    residual: float

    def pair(self, i: int) -> tuple[Optional[float], Optional[float]]:
        return self.lam1[i], self.lam2[i]

    def value(self, i: int, which: int) -> Optional[float]:
        return self.lam1[i] if which == 1 else self.lam2[i]

    def as_rows(self) -> list[list[Optional[float]]]:
        return [[a, b] for a, b in zip(self.lam1, self.lam2)]


@dataclass(frozen=True)
class NotionFlags:
    w: bool
    frechet_hat: bool
    limiting: bool
    clarke_bar: bool
    t_stationary: bool


class SaddleLabel(enum.Enum):
    NOT_SADDLE = "not_saddle"
    SINGULAR = "singular"
    REGULAR = "regular"


@dataclass(frozen=True)
class SaddleClass:
    per_index: dict  # biactive constraint (0-based) -> SaddleLabel
    is_first_order_saddle: bool
    is_singular: bool
    is_regular: bool


def active_gradients(p: SnoProblem, x, pattern: ActivePattern) -> np.ndarray:
    """Rows are the gradients of the active components, in pattern order."""
    rows = [p.grad_F_at(c.constraint, c.which, x) for c in pattern.components]
    return np.array(rows, dtype=float).reshape(len(rows), p.n)


def licq(p: SnoProblem, x, tol: float = DEFAULT.activity, pattern=None) -> LicqReport:
    if pattern is None:
        pattern = active_pattern(p, x, tol)
    G = active_gradients(p, x, pattern)
    rank, smin = numerical_rank(G)
    if G.shape[0] == 0:
        smin = float("inf")
    return LicqReport(rank == G.shape[0], G, rank, smin)


def solve_multipliers(p: SnoProblem, x, tol: float = DEFAULT.activity, pattern=None) -> MultiplierSet:
    """Least-squares multipliers of ``grad f = sum lam * grad F`` over active components.

    Refuses with LicqError when the active gradients are dependent, since the
    multipliers would not be unique.
    """
    if pattern is None:
        pattern = active_pattern(p, x, tol)
    report = licq(p, x, tol, pattern)
    if not report.holds:
        raise LicqError(
            f"SNO-LICQ fails at {list(map(float, x))}: rank {report.rank} "
            f"of {report.active_gradients.shape[0]} active gradients"
        )
    g = p.grad_f_at(x)
    G = report.active_gradients
    lam = lstsq_qr(G.T, g)
    residual = float(np.linalg.norm(g - G.T @ lam)) if lam.size else float(np.linalg.norm(g))
    lam1: list[Optional[float]] = [None] * p.m
    lam2: list[Optional[float]] = [None] * p.m
    for c, value in zip(pattern.components, lam):
        (lam1 if c.which == 1 else lam2)[c.constraint] = float(value) + 0.0
    return MultiplierSet(tuple(lam1), tuple(lam2), residual)


def _reduced_signs_ok(ms: MultiplierSet, pattern: ActivePattern, zero_tol: float) -> bool:
    for c in pattern.components:
        if c.reduction is Reduction.GE and sign(ms.value(c.constraint, c.which), zero_tol) < 0:
            return False
        if c.reduction is Reduction.LE and sign(ms.value(c.constraint, c.which), zero_tol) > 0:
            return False
    return True


def _biactive_signs(ms, pattern, zero_tol):
    return [(i, sign(ms.lam1[i], zero_tol), sign(ms.lam2[i], zero_tol)) for i in pattern.biactive]


def classify_notions(
    ms: MultiplierSet,
    pattern: ActivePattern,
    cone: ConeKind,
    zero_tol: float = DEFAULT.zero,
    w_tol: float = DEFAULT.w,
) -> NotionFlags:
    if not ms.residual <= w_tol:
        return NotionFlags(False, False, False, False, False)
    if not _reduced_signs_ok(ms, pattern, zero_tol):
        # The reduced problem is an NLP there: every notion is the KKT condition.
        return NotionFlags(True, False, False, False, False)
    signs = _biactive_signs(ms, pattern, zero_tol)
    return NotionFlags(
        w=True,
        frechet_hat=all(_FRECHET[cone](s1, s2) for _, s1, s2 in signs),
        limiting=all(_LIMITING[cone](s1, s2) for _, s1, s2 in signs),
        clarke_bar=all(_CLARKE[cone](s1, s2) for _, s1, s2 in signs),
        t_stationary=all(_TOPOLOGICAL[cone](s1, s2) for _, s1, s2 in signs),
    )


def classify_saddle(
    ms: MultiplierSet,
    pattern: ActivePattern,
    cone: ConeKind,
    zero_tol: float = DEFAULT.zero,
    w_tol: float = DEFAULT.w,
) -> SaddleClass:
    """Saddle-point-of-first-order taxonomy of a T-stationary point.

    Only indices whose pair lies in the cone's saddle region can witness
    singularity (exactly one multiplier vanishes) or regularity (none does).
    """
    t_stat = classify_notions(ms, pattern, cone, zero_tol, w_tol).t_stationary
    labels = {}
    for i, s1, s2 in _biactive_signs(ms, pattern, zero_tol):
        label = SaddleLabel.NOT_SADDLE
        if t_stat and (s1, s2) != (0, 0) and _SADDLE[cone](s1, s2):
            label = SaddleLabel.SINGULAR if s1 * s2 == 0 else SaddleLabel.REGULAR
        labels[i] = label
    singular = any(v is SaddleLabel.SINGULAR for v in labels.values())
    regular = any(v is SaddleLabel.REGULAR for v in labels.values())
    return SaddleClass(labels, singular or regular, singular, regular)


def _snap(value, zero_tol):
    return 0.0 if abs(value) <= zero_tol else float(value)


def c_stationarity_check(
    p: SnoProblem,
    x,
    ms: MultiplierSet,
    pattern: ActivePattern | None = None,
    zero_tol: float = DEFAULT.zero,
    w_tol: float = DEFAULT.w,
    tol: float = DEFAULT.activity,
) -> bool:
    """Clarke stationarity for the min-form (complementarity) or max-form (disjunctive).

    Each biactive pair must be writable as ``lam * (beta, 1 - beta)`` with
    ``beta`` in [0, 1], and ``lam >= 0`` in the disjunctive case.
    """
    if p.cone not in (C, D):
        raise UnsupportedConeError(
            f"C-stationarity is not defined for the {p.cone.value} cone"
        )
    if pattern is None:
        pattern = active_pattern(p, x, tol)
    if not ms.residual <= w_tol:
        return False
    for c in pattern.components:
        if c.reduction is Reduction.BIACTIVE:
            continue
        # Single active piece: the Clarke subdifferential is its gradient.
        if p.cone is D and _snap(ms.value(c.constraint, c.which), zero_tol) < 0:
            return False
    for i in pattern.biactive:
        l1, l2 = _snap(ms.lam1[i], zero_tol), _snap(ms.lam2[i], zero_tol)
        total = l1 + l2
        if total == 0.0:
            if l1 != 0.0 or l2 != 0.0:
                return False
            continue
        beta = l1 / total
        if not 0.0 <= beta <= 1.0:
            return False
        if p.cone is D and total < 0:
            return False
    return True


def s_stationarity_check(ms: MultiplierSet, pattern: ActivePattern, zero_tol: float = DEFAULT.zero,
                         w_tol: float = DEFAULT.w) -> bool:
    """Strong stationarity for complementarity problems written as an NLP.

    With ``F1*F2 = 0, F1 >= 0, F2 >= 0`` the product gradient vanishes at a
    biactive point, leaving nonnegative multipliers for both components.
    """
    if not ms.residual <= w_tol:
        return False
    return all(_snap(ms.lam1[i], zero_tol) >= 0.0 and _snap(ms.lam2[i], zero_tol) >= 0.0
               for i in pattern.biactive)
