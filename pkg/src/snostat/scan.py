"""Stratified search for all stationary points of a small instance.

Every constraint is put on one of four strata (``F1 = 0``, ``F2 = 0``, both,
neither).  On each combination of strata the stationarity system

    grad f(x) - sum_k mu_k grad F_k(x) = 0,   F_k(x) = 0  for k on the stratum

is square in ``(x, mu)`` and is solved by damped Newton from a grid of seeds.
Converged points are filtered (box, feasibility, LICQ, W-stationarity),
deduplicated and classified on their own active pattern.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import LicqError
from .newton import damped_newton
from .problem import SnoProblem, feasible
from .report import StationarityReport, analyze_point
from .tolerances import DEFAULT, Tolerances

log = logging.getLogger(__name__)

DEDUPE_RADIUS = 1e-6
BOX_SLACK = 1e-9

STRATA = ((1,), (2,), (1, 2), ())


@dataclass
class ScanResult:
    reports: list[StationarityReport]
    seeds: int = 0
    converged: int = 0
    dropped: int = 0
    patterns: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def points(self) -> list[tuple[float, ...]]:
        return [r.point for r in self.reports]

    def t_stationary(self) -> list[StationarityReport]:
        return [r for r in self.reports if r.flags.t_stationary]

    def to_list(self) -> list[dict]:
        return [r.to_dict() for r in self.reports]


def stationarity_system(p: SnoProblem, components):
    """Residual/Jacobian callback for the stratified system on ``components``.

    ``components`` is a sequence of ``(constraint, which)`` pairs forced to zero.
    """
    n, k = p.n, len(components)
    values = ex.compile_array([p.pairs[i][w - 1] for i, w in components])
    jac = ex.compile_array([g for i, w in components for g in p.grad_F(i, w)], (k, n))

    def fun(z):
        x, mu = z[:n], z[n:]
        g = p.grad_f_at(x)
        H = p.hess_f_at(x)
        G = jac(x)
        for mu_k, (i, w) in zip(mu, components):
            if mu_k:
                H = H - mu_k * p.hess_F_at(i, w, x)
        r = np.concatenate([g - G.T @ mu, values(x)])
        J = np.zeros((n + k, n + k))
        J[:n, :n] = H
        J[:n, n:] = -G.T
        J[n:, :n] = G
        return r, J

    def initial_multipliers(x):
        if k == 0:
            return np.zeros(0)
        return np.linalg.lstsq(jac(x).T, p.grad_f_at(x), rcond=None)[0]

    return fun, initial_multipliers


def seed_grid(box, seeds_per_axis: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, seeds_per_axis) for lo, hi in box]
    return np.array(list(itertools.product(*axes)), dtype=float)


def _in_box(x, box):
    return all(lo - BOX_SLACK <= v <= hi + BOX_SLACK for v, (lo, hi) in zip(x, box))


def _clean(x):
    return np.where(np.abs(x) < 1e-13, 0.0, x) + 0.0


def stratified_scan(
    p: SnoProblem,
    box,
    seeds_per_axis: int = 8,
    tols: Tolerances = DEFAULT,
    dedupe_radius: float = DEDUPE_RADIUS,
) -> ScanResult:
    box = [(float(lo), float(hi)) for lo, hi in box]
    if len(box) != p.n:
        raise ValueError(f"box has {len(box)} axes, problem dimension is {p.n}")
    if seeds_per_axis < 2:
        raise ValueError("seeds_per_axis must be at least 2")
    if any(lo > hi for lo, hi in box):
        return ScanResult([])

    seeds = seed_grid(box, seeds_per_axis)
    result = ScanResult([])
    kept: list[np.ndarray] = []
    for strata in itertools.product(STRATA, repeat=p.m):
        components = [(i, w) for i, ws in enumerate(strata) for w in ws]
        fun, init_mu = stationarity_system(p, components)
        result.patterns += 1
        for seed in seeds:
            result.seeds += 1
            try:
                z0 = np.concatenate([seed, init_mu(seed)])
            except ex.DomainError:
                result.dropped += 1
                continue
            sol = damped_newton(fun, z0)
            if not sol.converged:
                result.dropped += 1
                continue
            result.converged += 1
            x = _clean(sol.z[: p.n])
            if not _in_box(x, box) or not feasible(p, x, tols.activity):
                continue
            if any(np.max(np.abs(x - y)) < dedupe_radius for y in kept):
                continue
            kept.append(x)

    for x in sorted(kept, key=tuple):
        try:
            rep = analyze_point(p, x, tols)
        except LicqError:
            log.debug("dropping %s: LICQ fails", x)
            continue
        if rep.flags.w:
            result.reports.append(rep)
    return result
