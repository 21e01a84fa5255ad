"""Problem instances, the five planar cones and local active structure."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import expr as ex
from .errors import InfeasiblePointError, SnoError

DEFAULT_ACTIVITY_TOL = 1e-8


class ConeKind(enum.Enum):
    COMPLEMENTARITY = "complementarity"
    VANISHING = "vanishing"
    ORTHOGONALITY = "orthogonality"
    SWITCHING = "switching"
    DISJUNCTIVE = "disjunctive"

    @classmethod
    def parse(cls, name: str) -> "ConeKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise SnoError(f"unknown cone {name!r}") from None


def cone_membership(cone: ConeKind, a: Sequence[float], tol: float = 0.0) -> bool:
    """Whether the pair ``a`` satisfies the cone's defining relations up to ``tol``."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    a1, a2 = float(a[0]), float(a[1])
    if cone is ConeKind.COMPLEMENTARITY:
        return abs(a1 * a2) <= tol and a1 >= -tol and a2 >= -tol
    if cone is ConeKind.VANISHING:
        return a1 >= -tol and a1 * a2 <= tol
    if cone is ConeKind.ORTHOGONALITY:
        return abs(a1 * a2) <= tol and a2 >= -tol
    if cone is ConeKind.SWITCHING:
        return abs(a1 * a2) <= tol
    if cone is ConeKind.DISJUNCTIVE:
        return a1 >= -tol or a2 >= -tol
    raise TypeError(cone)


def _projection_candidates(cone, a1, a2):
    # Ordered so that the first entry is the first-axis candidate.
    if cone is ConeKind.COMPLEMENTARITY:
        return [(max(a1, 0.0), 0.0), (0.0, max(a2, 0.0))]
    if cone is ConeKind.VANISHING:
        return [(max(a1, 0.0), min(a2, 0.0)), (0.0, a2)]
    if cone is ConeKind.ORTHOGONALITY:
        return [(a1, 0.0), (0.0, max(a2, 0.0))]
    if cone is ConeKind.SWITCHING:
        return [(a1, 0.0), (0.0, a2)]
    if cone is ConeKind.DISJUNCTIVE:
        if a1 >= 0 or a2 >= 0:
            return [(a1, a2)]
        return [(0.0, a2), (a1, 0.0)]
    raise TypeError(cone)


def cone_project(cone: ConeKind, a: Sequence[float]) -> tuple[float, float]:
    """Nearest point of the cone to ``a``.

    Each cone is a union of at most two closed convex pieces, so the
    projection is the best of the piecewise projections.  Ties go to the
    candidate with the larger maximal coordinate, then to the first-axis one.
    """
    a1, a2 = float(a[0]), float(a[1])
    best = None
    best_key = None
    for order, (c1, c2) in enumerate(_projection_candidates(cone, a1, a2)):
        key = (math.hypot(a1 - c1, a2 - c2), -max(c1, c2), order)
        if best_key is None or key < best_key:
            best, best_key = (c1, c2), key
    return (best[0] + 0.0, best[1] + 0.0)


def cone_distance(cone: ConeKind, a1, a2):
    """Vectorised Euclidean distance from pairs ``(a1, a2)`` to the cone."""
    a1 = np.asarray(a1, dtype=float)
    a2 = np.asarray(a2, dtype=float)
    pos1, pos2 = np.maximum(a1, 0.0), np.maximum(a2, 0.0)
    neg1, neg2 = np.minimum(a1, 0.0), np.minimum(a2, 0.0)
    if cone is ConeKind.COMPLEMENTARITY:
        d1 = np.hypot(a1 - pos1, a2)
        d2 = np.hypot(a1, a2 - pos2)
    elif cone is ConeKind.VANISHING:
        d1 = np.hypot(a1 - pos1, a2 - neg2)
        d2 = np.abs(a1)
    elif cone is ConeKind.ORTHOGONALITY:
        d1 = np.abs(a2)
        d2 = np.hypot(a1, a2 - pos2)
    elif cone is ConeKind.SWITCHING:
        d1 = np.abs(a2)
        d2 = np.abs(a1)
    elif cone is ConeKind.DISJUNCTIVE:
        d1 = np.abs(neg1)
        d2 = np.abs(neg2)
    else:
        raise TypeError(cone)
    return np.minimum(d1, d2)


@dataclass(frozen=True)
class SnoProblem:
    """``min f(x)`` subject to ``(F1_i(x), F2_i(x))`` in the cone for every i."""

    n: int
    objective: ex.Expr
    pairs: tuple[tuple[ex.Expr, ex.Expr], ...]
    cone: ConeKind
    name: str = ""
    _derivs: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise SnoError("dimension must be positive")
        if len(self.pairs) < 1:
            raise SnoError("at least one constraint pair is required")
        object.__setattr__(self, "pairs", tuple(tuple(p) for p in self.pairs))
        for e in (self.objective, *[g for p in self.pairs for g in p]):
            if e.max_index() > self.n:
                raise SnoError(f"expression {e} uses a variable beyond x{self.n}")
        object.__setattr__(self, "_derivs", {})

    @property
    def m(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_strings(cls, n, objective, constraints, cone, name=""):
        if isinstance(cone, str):
            cone = ConeKind.parse(cone)
        pairs = tuple((ex.parse(f1, n), ex.parse(f2, n)) for f1, f2 in constraints)
        return cls(n, ex.parse(objective, n), pairs, cone, name)

    @classmethod
    def from_dict(cls, data: dict, name: str = "") -> "SnoProblem":
        try:
            n = int(data["n"])
            cons = [(c["F1"], c["F2"]) for c in data["constraints"]]
            return cls.from_strings(n, data["objective"], cons, data["cone"],
                                    name or data.get("name", ""))
        except (KeyError, TypeError) as err:
            raise SnoError(f"malformed problem description: {err!r}") from None

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "cone": self.cone.value,
            "objective": str(self.objective),
            "constraints": [{"F1": str(a), "F2": str(b)} for a, b in self.pairs],
        }
        if self.name:
            d["name"] = self.name
        return d

    # Cached symbolic derivatives.  Exprs are immutable, so caching is safe.

    def _cached(self, key, build):
        table = self._derivs
        if key not in table:
            table[key] = build()
        return table[key]

    def grad_f(self):
        return self._cached("gf", lambda: ex.gradient(self.objective, self.n))

    def hess_f(self):
        return self._cached("hf", lambda: ex.hessian(self.objective, self.n))

    def grad_F(self, i: int, which: int):
        return self._cached(("gF", i, which),
                            lambda: ex.gradient(self.pairs[i][which - 1], self.n))

    def hess_F(self, i: int, which: int):
        return self._cached(("hF", i, which),
                            lambda: ex.hessian(self.pairs[i][which - 1], self.n))

    # Compiled numeric evaluators for float points.  ``expr.evaluate`` stays
    # the reference path (and the one that accepts grids).

    def _compiled(self, key, build):
        return self._cached(("c",) + key, build)

    def f(self, x) -> float:
        fn = self._compiled(("f",), lambda: ex.compile_array([self.objective]))
        return float(fn(x)[0])

    def F(self, x) -> np.ndarray:
        """Constraint values as an ``(m, 2)`` array."""
        fn = self._compiled(("F",), lambda: ex.compile_array(
            [g for pair in self.pairs for g in pair], (self.m, 2)))
        return fn(x)

    def grad_f_at(self, x) -> np.ndarray:
        return self._compiled(("gf",), lambda: ex.compile_array(self.grad_f()))(x)

    def hess_f_at(self, x) -> np.ndarray:
        return self._compiled(("hf",), lambda: ex.compile_array(
            [h for row in self.hess_f() for h in row], (self.n, self.n)))(x)

    def grad_F_at(self, i: int, which: int, x) -> np.ndarray:
        return self._compiled(("gF", i, which),
                              lambda: ex.compile_array(self.grad_F(i, which)))(x)

    def hess_F_at(self, i: int, which: int, x) -> np.ndarray:
        return self._compiled(("hF", i, which), lambda: ex.compile_array(
            [h for row in self.hess_F(i, which) for h in row], (self.n, self.n)))(x)


def load_problem(path) -> SnoProblem:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise SnoError(f"{path}: a problem file must hold a JSON object")
    return SnoProblem.from_dict(data, name=data.get("name", path.stem))


def feasible(p: SnoProblem, x, tol: float = DEFAULT_ACTIVITY_TOL) -> bool:
    return all(cone_membership(p.cone, pair, tol) for pair in p.F(x))


class Status(enum.Enum):
    BIACTIVE = "biactive"
    FIRST_ACTIVE = "first_active"
    SECOND_ACTIVE = "second_active"
    INACTIVE = "inactive"


class Reduction(enum.Enum):
    """How an active component enters the locally reduced problem.

    ``GE`` means ``F >= 0`` (multiplier must be >= 0), ``LE`` means
    ``F <= 0`` (multiplier must be <= 0).
    """

    BIACTIVE = "biactive"
    EQ = "eq"
    GE = "ge"
    LE = "le"


@dataclass(frozen=True)
class ActiveComponent:
    constraint: int  # 0-based
    which: int  # 1 for F1, 2 for F2
    reduction: Reduction


@dataclass(frozen=True)
class ActivePattern:
    statuses: tuple[Status, ...]
    components: tuple[ActiveComponent, ...]
    tol: float
    values: tuple[tuple[float, float], ...]

    @property
    def biactive(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.statuses) if s is Status.BIACTIVE)


def _reduce(cone, status, a2):
    """Branch table for a constraint that is active but not biactive."""
    if status is Status.FIRST_ACTIVE:
        if cone is ConeKind.VANISHING and a2 < 0:
            return Reduction.GE
        if cone is ConeKind.DISJUNCTIVE:
            return Reduction.GE
        return Reduction.EQ
    if cone is ConeKind.VANISHING:
        return Reduction.LE
    if cone is ConeKind.DISJUNCTIVE:
        return Reduction.GE
    return Reduction.EQ


def active_pattern(p: SnoProblem, x, tol: float = DEFAULT_ACTIVITY_TOL) -> ActivePattern:
    values = p.F(x)
    if not all(cone_membership(p.cone, pair, tol) for pair in values):
        raise InfeasiblePointError(f"point {list(map(float, x))} is not feasible")
    statuses, comps = [], []
    for i, (a1, a2) in enumerate(values):
        z1, z2 = abs(a1) <= tol, abs(a2) <= tol
        if z1 and z2:
            st = Status.BIACTIVE
        elif p.cone is ConeKind.DISJUNCTIVE:
            # F1 = 0 only binds locally when F2 is strictly negative, and vice versa.
            if z1 and a2 < -tol:
                st = Status.FIRST_ACTIVE
            elif z2 and a1 < -tol:
                st = Status.SECOND_ACTIVE
            else:
                st = Status.INACTIVE
        elif z1:
            st = Status.FIRST_ACTIVE
        elif z2:
            st = Status.SECOND_ACTIVE
        else:
            st = Status.INACTIVE
        statuses.append(st)
        if st is Status.BIACTIVE:
            comps.append(ActiveComponent(i, 1, Reduction.BIACTIVE))
            comps.append(ActiveComponent(i, 2, Reduction.BIACTIVE))
        elif st is Status.FIRST_ACTIVE:
            comps.append(ActiveComponent(i, 1, _reduce(p.cone, st, a2)))
        elif st is Status.SECOND_ACTIVE:
            comps.append(ActiveComponent(i, 2, _reduce(p.cone, st, a2)))
    return ActivePattern(
        tuple(statuses), tuple(comps), tol, tuple((float(a), float(b)) for a, b in values)
    )
