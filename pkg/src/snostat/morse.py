"""Lagrangian curvature, quadratic/biactive/T-index and nondegeneracy."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import LicqError
from .linalg import jacobi_eigvalsh, null_space
from .problem import ActivePattern, ConeKind, Reduction, SnoProblem, active_pattern
from .stationarity import MultiplierSet, NotionFlags, licq, sign
from .tolerances import DEFAULT


@dataclass(frozen=True)
class LagrangeData:
    hessian_L: np.ndarray
    tangent_basis: np.ndarray
    restricted_hessian: np.ndarray
    eigenvalues: np.ndarray


class Verdict(enum.Enum):
    NONDEGENERATE_LOCAL_MIN = "nondegenerate_local_min"
    NONDEGENERATE_SADDLE = "nondegenerate_saddle"
    DEGENERATE = "degenerate"
    NOT_T_STATIONARY = "not_t_stationary"


@dataclass(frozen=True)
class MorseReport:
    qi: int
    bi: int
    ti: int
    nd1: bool
    nd2: bool
    nd3: bool
    verdict: Verdict


def lagrangian_hessian(p: SnoProblem, x, ms: MultiplierSet) -> np.ndarray:
    """Hessian of ``L = f - sum lam * F`` over the components carrying a multiplier."""
    H = p.hess_f_at(x)
    for i in range(p.m):
        for which in (1, 2):
            lam = ms.value(i, which)
            if lam:
                H -= lam * p.hess_F_at(i, which, x)
    return H


def _tangent_rows(p, x, ms, pattern, zero_tol):
    rows = []
    for c in pattern.components:
        if c.reduction in (Reduction.GE, Reduction.LE):
            lam = ms.value(c.constraint, c.which) if ms is not None else None
            # Weakly active inequalities do not restrict the tangent space.
            if lam is None or sign(lam, zero_tol) == 0:
                continue
        rows.append(p.grad_F_at(c.constraint, c.which, x))
    return np.array(rows, dtype=float).reshape(len(rows), p.n)


def tangent_basis(
    p: SnoProblem,
    x,
    tol: float = DEFAULT.activity,
    ms: MultiplierSet | None = None,
    pattern: ActivePattern | None = None,
    zero_tol: float = DEFAULT.zero,
) -> np.ndarray:
    """Orthonormal columns spanning the tangent space at ``x``.

    Biactive and equality-reduced components each contribute their gradient as
    a row of the constraint matrix; inequality-reduced components do so only
    when their multiplier is nonzero.
    """
    if pattern is None:
        pattern = active_pattern(p, x, tol)
    if not licq(p, x, tol, pattern).holds:
        raise LicqError("tangent space requested where SNO-LICQ fails")
    return null_space(_tangent_rows(p, x, ms, pattern, zero_tol), p.n)


def lagrange_data(p, x, ms, pattern=None, tol=DEFAULT.activity, zero_tol=DEFAULT.zero) -> LagrangeData:
    if pattern is None:
        pattern = active_pattern(p, x, tol)
    H = lagrangian_hessian(p, x, ms)
    B = tangent_basis(p, x, tol, ms, pattern, zero_tol)
    R = B.T @ H @ B
    R = 0.5 * (R + R.T)
    return LagrangeData(H, B, R, jacobi_eigvalsh(R))


def quadratic_index(restricted_hessian, eig_tol: float = DEFAULT.eig) -> tuple[int, bool]:
    """Count negative eigenvalues; also report whether the matrix is nonsingular."""
    R = np.asarray(restricted_hessian, dtype=float)
    if R.size == 0:
        return 0, True
    w = jacobi_eigvalsh(R)
    thresh = eig_tol * max(float(np.max(np.abs(w))), 1.0)
    return int(np.sum(w < -thresh)), bool(np.min(np.abs(w)) > thresh)


def biactive_index(ms: MultiplierSet, pattern: ActivePattern, cone: ConeKind,
                   zero_tol: float = DEFAULT.zero) -> int:
    count = 0
    for i in pattern.biactive:
        s1, s2 = sign(ms.lam1[i], zero_tol), sign(ms.lam2[i], zero_tol)
        if cone is ConeKind.COMPLEMENTARITY:
            count += s1 < 0 and s2 < 0
        else:
            count += s1 != 0 and s2 != 0
    return count


def nondegeneracy(p, x, ms, lag: LagrangeData, pattern=None, tol=DEFAULT.activity,
                  zero_tol=DEFAULT.zero, eig_tol=DEFAULT.eig) -> tuple[bool, bool, bool]:
    if pattern is None:
        pattern = active_pattern(p, x, tol)
    nd1 = licq(p, x, tol, pattern).holds
    nd2 = all(sign(ms.lam1[i], zero_tol) != 0 and sign(ms.lam2[i], zero_tol) != 0
              for i in pattern.biactive)
    _, nd3 = quadratic_index(lag.restricted_hessian, eig_tol)
    return nd1, nd2, nd3


def morse_verdict(flags: NotionFlags, nd: tuple[bool, bool, bool], qi: int, bi: int) -> MorseReport:
    ti = qi + bi
    if not flags.t_stationary:
        verdict = Verdict.NOT_T_STATIONARY
    elif all(nd):
        verdict = Verdict.NONDEGENERATE_LOCAL_MIN if ti == 0 else Verdict.NONDEGENERATE_SADDLE
    else:
        verdict = Verdict.DEGENERATE
    return MorseReport(qi, bi, ti, *nd, verdict)
