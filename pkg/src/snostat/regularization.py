"""Scholtes-type regularization of complementarity constraints.

Each pair ``(F1, F2)`` in the complementarity cone is relaxed to the three
smooth inequalities ``t - F1*F2 >= 0``, ``F1 >= 0``, ``F2 >= 0``.  KKT points
of the relaxed problem are found by active-set enumeration, and a single KKT
point can be followed as ``t`` decreases geometrically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import expr as ex
from .errors import (
    DomainError,
    InfeasiblePointError,
    LicqError,
    PathDivergenceError,
    SnoError,
    UnsupportedConeError,
)
from .newton import damped_newton
from .problem import ConeKind, SnoProblem, feasible
from .report import StationarityReport, analyze_point
from .scan import seed_grid, stationarity_system
from .tolerances import DEFAULT, Tolerances

KKT_TOL = 1e-8
KKT_DEDUPE_RADIUS = 1e-4
MAX_SUBSETS = 4096
MAX_PIVOTS = 5
MAX_SUBSTEP_DEPTH = 6
LIMIT_TOL = 1e-3


@dataclass(frozen=True)
class InequalityConstraint:
    """``g(x) >= 0`` with cached symbolic derivatives."""

    g: ex.Expr
    grad: tuple
    hess: tuple
    label: str


class RegularizedNlp:
    """The smooth problem ``min f`` subject to the relaxed cone at parameter ``t``."""

    def __init__(self, p: SnoProblem, t: float):
        if p.cone is not ConeKind.COMPLEMENTARITY:
            raise UnsupportedConeError(
                f"regularization is only available for the complementarity cone, not {p.cone.value}"
            )
        if not t > 0:
            raise ValueError("regularization parameter t must be positive")
        self.problem = p
        self.t = float(t)
        n = p.n
        cons = []
        for i, (F1, F2) in enumerate(p.pairs):
            for label, g in (
                (f"t-F1F2[{i + 1}]", ex.sub(ex.Const(self.t), ex.mul(F1, F2))),
                (f"F1[{i + 1}]", F1),
                (f"F2[{i + 1}]", F2),
            ):
                cons.append(InequalityConstraint(g, ex.gradient(g, n), ex.hessian(g, n), label))
        self.constraints = tuple(cons)
        k = len(cons)
        self._g = ex.compile_array([c.g for c in cons])
        self._jac = ex.compile_array([d for c in cons for d in c.grad], (k, n))
        self._hess = [ex.compile_array([h for row in c.hess for h in row], (n, n)) for c in cons]

    @property
    def n(self) -> int:
        return self.problem.n

    def g(self, x) -> np.ndarray:
        return self._g(x)

    def jacobian(self, x) -> np.ndarray:
        return self._jac(x)

    def with_t(self, t: float) -> "RegularizedNlp":
        return RegularizedNlp(self.problem, t)

    def kkt_residual(self, x, mu) -> float:
        """Max of stationarity norm, complementarity products and sign/feasibility violations."""
        mu = np.asarray(mu, dtype=float)
        g = self.g(x)
        grad_f = self.problem.grad_f_at(x)
        stat = float(np.linalg.norm(grad_f - self.jacobian(x).T @ mu))
        return max(
            stat,
            float(np.max(np.abs(mu * g), initial=0.0)),
            float(np.max(-g, initial=0.0)),
            float(np.max(-mu, initial=0.0)),
        )

    def system(self, active):
        """Residual/Jacobian of the KKT equations with ``active`` constraints tight."""
        p, n, k = self.problem, self.n, len(active)
        idx = list(active)

        def fun(z):
            x, mu = z[:n], z[n:]
            H = p.hess_f_at(x)
            G = self._jac(x)[idx].reshape(k, n)
            for mu_j, j in zip(mu, idx):
                if mu_j:
                    H = H - mu_j * self._hess[j](x)
            r = np.concatenate([p.grad_f_at(x) - G.T @ mu, self._g(x)[idx]])
            J = np.zeros((n + k, n + k))
            J[:n, :n] = H
            J[:n, n:] = -G.T
            J[n:, :n] = G
            return r, J

        return fun

    def initial_multipliers(self, x, active) -> np.ndarray:
        if not active:
            return np.zeros(0)
        G = self.jacobian(x)[list(active)]
        return np.linalg.lstsq(G.T, self.problem.grad_f_at(x), rcond=None)[0]

    def full_multipliers(self, active, mu_active) -> np.ndarray:
        mu = np.zeros(len(self.constraints))
        mu[list(active)] = mu_active
        return mu


def build_nlp_t(p: SnoProblem, t: float) -> RegularizedNlp:
    return RegularizedNlp(p, t)


@dataclass(frozen=True)
class KktPoint:
    x: tuple[float, ...]
    mu: tuple[float, ...]
    active: tuple[int, ...]
    residual: float


def _solve_on(nlp: RegularizedNlp, active, x0, mu0=None):
    if mu0 is None:
        mu0 = nlp.initial_multipliers(x0, active)
    sol = damped_newton(nlp.system(active), np.concatenate([x0, mu0]))
    if not sol.converged:
        return None
    x = sol.z[: nlp.n]
    mu = nlp.full_multipliers(active, sol.z[nlp.n:])
    return x, mu


def _valid(nlp, x, mu, tols, kkt_tol):
    g = nlp.g(x)
    if np.any(g < -tols.activity) or np.any(mu < -tols.zero):
        return False
    return nlp.kkt_residual(x, mu) <= kkt_tol


def _subsets(count):
    if 2**count > MAX_SUBSETS:
        raise SnoError(
            f"{count} inequality constraints give {2**count} active sets, cap is {MAX_SUBSETS}"
        )
    for size in range(count + 1):
        yield from itertools.combinations(range(count), size)


def kkt_points_at(
    nlp: RegularizedNlp,
    box,
    seeds_per_axis: int = 8,
    tols: Tolerances = DEFAULT,
    kkt_tol: float = KKT_TOL,
    dedupe_radius: float = KKT_DEDUPE_RADIUS,
) -> list[KktPoint]:
    """All KKT points in ``box`` found by enumerating active sets from a seed grid."""
    seeds = seed_grid([(float(lo), float(hi)) for lo, hi in box], seeds_per_axis)
    found: list[KktPoint] = []
    for active in _subsets(len(nlp.constraints)):
        for seed in seeds:
            try:
                sol = _solve_on(nlp, active, seed)
            except DomainError:
                continue
            if sol is None:
                continue
            x, mu = sol
            if not all(lo - 1e-9 <= v <= hi + 1e-9 for v, (lo, hi) in zip(x, box)):
                continue
            if not _valid(nlp, x, mu, tols, kkt_tol):
                continue
            point = KktPoint(tuple(map(float, x)), tuple(map(float, mu)), tuple(active),
                             nlp.kkt_residual(x, mu))
            near = [j for j, k in enumerate(found)
                    if np.max(np.abs(x - np.array(k.x))) < dedupe_radius]
            if near:
                # Degenerate roots converge slowly; keep the best-polished copy.
                j = near[0]
                if point.residual < found[j].residual:
                    found[j] = point
                continue
            found.append(point)
    return sorted(found, key=lambda k: k.x)


@dataclass(frozen=True)
class PathState:
    t: float
    x: tuple[float, ...]
    mu: tuple[float, ...]
    residual: float
    active: tuple[int, ...]


@dataclass
class ScholtesPath:
    schedule: list[float]
    states: list[PathState] = field(default_factory=list)
    limit: Optional[tuple[float, ...]] = None
    limit_point: Optional[tuple[float, ...]] = None
    limit_report: Optional[StationarityReport] = None
    note: str = ""

    def to_list(self) -> list[dict]:
        rows = [{"t": s.t, "x": list(s.x), "residual": s.residual} for s in self.states]
        rows.append({
            "limit": list(self.limit) if self.limit is not None else None,
            "limit_point": list(self.limit_point) if self.limit_point is not None else None,
            "report": self.limit_report.to_dict() if self.limit_report is not None else None,
            "note": self.note,
        })
        return rows


def _nearest_kkt(nlp, start, tols, kkt_tol):
    best = None
    for active in _subsets(len(nlp.constraints)):
        try:
            sol = _solve_on(nlp, active, start)
        except DomainError:
            continue
        if sol is None or not _valid(nlp, *sol, tols, kkt_tol):
            continue
        dist = float(np.max(np.abs(sol[0] - start)))
        if best is None or dist < best[0]:
            best = (dist, sol[0], sol[1], active)
    return best


def _step(nlp, x_prev, mu_prev, active, tols, kkt_tol):
    """Warm-started solve at a new ``t`` with up to MAX_PIVOTS active-set corrections."""
    active = list(active)
    for _ in range(MAX_PIVOTS + 1):
        try:
            sol = _solve_on(nlp, tuple(active), x_prev, mu_prev[active])
        except DomainError:
            sol = None
        if sol is None:
            return None
        x, mu = sol
        g = nlp.g(x)
        negative = [j for j in active if mu[j] < -tols.zero]
        violated = [j for j in range(len(g)) if j not in active and g[j] < -tols.activity]
        if not negative and not violated:
            if nlp.kkt_residual(x, mu) <= kkt_tol:
                return x, mu, tuple(sorted(active))
            return None
        if negative:
            active.remove(min(negative, key=lambda j: mu[j]))
        else:
            active.append(min(violated, key=lambda j: g[j]))
            active.sort()
    return None


def _advance(nlp, x, mu, active, t, tols, kkt_tol, depth):
    """Move from ``nlp.t`` to ``t``, splitting the step geometrically when Newton fails."""
    target = nlp.with_t(t)
    nxt = _step(target, x, mu, active, tols, kkt_tol)
    if nxt is not None or depth == 0:
        return nxt
    mid = _advance(nlp, x, mu, active, math.sqrt(nlp.t * t), tols, kkt_tol, depth - 1)
    if mid is None:
        return None
    return _advance(nlp.with_t(math.sqrt(nlp.t * t)), *mid, t, tols, kkt_tol, depth - 1)


def identify_limit(p: SnoProblem, x, tols: Tolerances = DEFAULT, limit_tol: float = LIMIT_TOL):
    """Snap a near-limit point onto the stratum of components smaller than ``limit_tol``.

    Returns the polished point, or None if polishing fails or moves further
    than ``limit_tol``.
    """
    x = np.asarray(x, dtype=float)
    vals = p.F(x)
    components = [(i, w) for i in range(p.m) for w in (1, 2) if abs(vals[i, w - 1]) <= limit_tol]
    fun, init_mu = stationarity_system(p, components)
    sol = damped_newton(fun, np.concatenate([x, init_mu(x)]))
    if not sol.converged:
        return None
    y = sol.z[: p.n]
    y = np.where(np.abs(y) < 1e-13, 0.0, y) + 0.0
    if np.max(np.abs(y - x)) > limit_tol or not feasible(p, y, tols.activity):
        return None
    return y


def path_follow(
    p: SnoProblem,
    start,
    t0: float,
    theta: float,
    steps: int,
    tols: Tolerances = DEFAULT,
    kkt_tol: float = KKT_TOL,
    limit_tol: float = LIMIT_TOL,
) -> ScholtesPath:
    """Follow a KKT point of the relaxed problem along ``t_k = t0 * theta**k``."""
    if not t0 > 0:
        raise ValueError("t0 must be positive")
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    start = np.asarray(start, dtype=float)
    if start.shape != (p.n,):
        raise ValueError(f"start point must have dimension {p.n}")

    schedule = [t0 * theta**k for k in range(steps + 1)]
    path = ScholtesPath(schedule)
    nlp = RegularizedNlp(p, t0)
    first = _nearest_kkt(nlp, start, tols, kkt_tol)
    if first is None:
        raise PathDivergenceError(f"no KKT point of the relaxed problem near {start.tolist()}", path)
    _, x, mu, active = first
    path.states.append(PathState(t0, tuple(map(float, x)), tuple(map(float, mu)),
                                 nlp.kkt_residual(x, mu), tuple(active)))
    for t in schedule[1:]:
        nxt = _advance(nlp, x, mu, active, t, tols, kkt_tol, MAX_SUBSTEP_DEPTH)
        nlp = nlp.with_t(t)
        if nxt is None:
            path.limit = tuple(map(float, x))
            raise PathDivergenceError(f"Newton failed at t={t:g}", path)
        x, mu, active = nxt
        path.states.append(PathState(t, tuple(map(float, x)), tuple(map(float, mu)),
                                     nlp.kkt_residual(x, mu), active))

    path.limit = tuple(map(float, x))
    y = identify_limit(p, x, tols, limit_tol)
    if y is None:
        if feasible(p, x, tols.activity):
            y = np.asarray(x)
        else:
            path.note = "last iterate is not feasible for the original problem"
            return path
    path.limit_point = tuple(map(float, y))
    try:
        path.limit_report = analyze_point(p, y, tols)
    except (InfeasiblePointError, LicqError) as err:
        path.note = str(err)
    return path


def closed_form_branches(t: float) -> list[tuple[float, float]]:
    """KKT points of the relaxed regular-saddle instance, for cross-checks."""
    r = math.sqrt(1.0 - 4.0 * t)
    s = math.sqrt(t)
    return [(s, s), ((1 + r) / 2, (1 - r) / 2), ((1 - r) / 2, (1 + r) / 2)]
