"""Self-check of the bundled instances against their known structure.

Each check returns a :class:`Check` with a one-line detail.  The perturbed
second singular instance is expected to expose five stationary points on the
``x2`` axis; the check reports honestly if fewer are found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import catalog
from .regularization import RegularizedNlp, closed_form_branches, kkt_points_at, path_follow
from .report import analyze_point
from .scan import stratified_scan

BOX = [(-0.5, 1.5), (-0.5, 1.5)]
EPS = 0.05


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str


def _lam(rep):
    return rep.multipliers.lam1[0], rep.multipliers.lam2[0]


def _close(a, b, tol=1e-9):
    return all(abs(u - v) <= tol for u, v in zip(a, b))


def _same_points(found, expected, tol=1e-8):
    if len(found) != len(expected):
        return False
    return all(any(_close(f, e, tol) for f in found) for e in expected)


def _fmt(points):
    return "[" + ", ".join("(" + ", ".join(f"{v:.6g}" for v in pt) + ")" for pt in points) + "]"


def _flags(rep):
    f = rep.flags
    return f"Nhat={f.frechet_hat} N={f.limiting} T={f.t_stationary} Nbar={f.clarke_bar}"


def _axis_roots(eps):
    """Real roots of ``-eps + 2 s - 2 s^3`` by bisection on sign changes."""
    g = lambda s: -eps + 2 * s - 2 * s**3  # noqa: E731
    grid = np.linspace(-2.0, 2.0, 4001)
    roots = []
    for lo, hi in zip(grid, grid[1:]):
        if g(lo) == 0:
            roots.append(float(lo))
        elif g(lo) * g(hi) < 0:
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                lo, hi = (lo, mid) if g(lo) * g(mid) <= 0 else (mid, hi)
            roots.append(0.5 * (lo + hi))
    return roots


def check_regular_saddle() -> Check:
    p = catalog.regular_saddle()
    rep = analyze_point(p, (0.0, 0.0))
    scan = stratified_scan(p, BOX)
    ok = (
        _close(_lam(rep), (-2.0, -2.0))
        and rep.flags.t_stationary and not rep.flags.limiting and not rep.flags.frechet_hat
        and rep.flags.clarke_bar and rep.saddle.is_regular
        and (rep.morse.qi, rep.morse.bi, rep.morse.ti) == (0, 1, 1)
        and _same_points(scan.points, [(0, 0), (1, 0), (0, 1)])
    )
    return Check("regular_saddle", ok, f"lam={_lam(rep)} {_flags(rep)} scan={_fmt(scan.points)}")


def check_singular_saddle_1() -> Check:
    p = catalog.singular_saddle_1()
    rep = analyze_point(p, (0.0, 0.0))
    scan = stratified_scan(p, BOX)
    ok = (
        _close(_lam(rep), (-1.0, 0.0))
        and rep.flags.limiting and not rep.flags.frechet_hat and rep.saddle.is_singular
        and not rep.morse.nd2
        and _same_points(scan.points, [(0, 0), (1, 0), (0, 1)])
    )
    return Check("singular_saddle_1", ok, f"lam={_lam(rep)} {_flags(rep)} scan={_fmt(scan.points)}")


def check_singular_saddle_2() -> Check:
    p = catalog.singular_saddle_2()
    rep = analyze_point(p, (0.0, 0.0))
    scan = stratified_scan(p, BOX)
    by_point = {r.point: r for r in scan.reports}
    low, high = by_point.get((1.0, 0.0)), by_point.get((0.0, 1.0))
    ok = (
        rep.saddle.is_singular
        and _same_points(scan.points, [(0, 0), (1, 0), (0, 1)])
        and low is not None and low.morse.qi == 0
        and high is not None and high.morse.qi == 1
    )
    return Check("singular_saddle_2", ok, f"lam={_lam(rep)} scan={_fmt(scan.points)}")


def check_singular_saddle_2_perturbed(eps: float = EPS) -> Check:
    p = catalog.singular_saddle_2(eps)
    rep = analyze_point(p, (0.0, 0.0))
    scan = stratified_scan(p, BOX)
    positive = [r for r in _axis_roots(eps) if r > 0]
    expected = [(0.0, 0.0), (1.0, 0.0)] + [(0.0, s) for s in positive]
    ok = (
        _close(_lam(rep), (-1.0, -eps))
        and rep.saddle.is_regular
        and len(scan.points) == 5
        and len(positive) == 3
        and _same_points(scan.points, expected)
    )
    return Check(
        "singular_saddle_2_perturbed",
        ok,
        f"lam={_lam(rep)} scan={_fmt(scan.points)} positive axis roots={_fmt([positive])}",
    )


def check_second_order_saddle() -> Check:
    rep = analyze_point(catalog.second_order_saddle(), (0.0, 0.0))
    ok = _close(_lam(rep), (0.0, 0.0)) and rep.flags.frechet_hat and not rep.saddle.is_first_order_saddle
    return Check("second_order_saddle", ok, f"lam={_lam(rep)} {_flags(rep)}")


def check_not_saddle() -> Check:
    rep = analyze_point(catalog.not_saddle(), (0.0, 0.0))
    comp = analyze_point(catalog.not_saddle_companion(), (0.0, 0.0))
    ok = (
        _close(_lam(rep), (1.0, 0.0)) and rep.flags.frechet_hat
        and not rep.saddle.is_first_order_saddle and _close(_lam(comp), _lam(rep))
    )
    return Check("not_saddle", ok, f"lam={_lam(rep)} companion lam={_lam(comp)}")


def check_non_t_stationary() -> Check:
    p = catalog.non_t_stationary()
    rep = analyze_point(p, (0.0, 0.0))
    t_points = [r.point for r in stratified_scan(p, BOX).t_stationary()]
    ok = (
        _close(_lam(rep), (1.0, -1.0)) and not rep.flags.t_stationary and rep.flags.clarke_bar
        and _same_points(t_points, [(1, 0), (0, 1)])
    )
    return Check("non_t_stationary", ok, f"lam={_lam(rep)} {_flags(rep)} T-points={_fmt(t_points)}")


def check_scholtes() -> Check:
    p = catalog.scholtes()
    t = 0.01
    kkt = [k.x for k in kkt_points_at(RegularizedNlp(p, t), BOX)]
    path = path_follow(p, (0.1, 0.1), t, 0.1, 6)
    lim = path.limit_report
    ok = (
        _same_points(kkt, closed_form_branches(t))
        and lim is not None
        and math.dist(path.limit, (0.0, 0.0)) <= 1e-3
        and lim.flags.t_stationary and not lim.flags.limiting and not lim.flags.frechet_hat
    )
    detail = f"KKT(t=0.01)={_fmt(kkt)} limit={_fmt([path.limit])}"
    if lim is not None:
        detail += " " + _flags(lim)
    return Check("scholtes", ok, detail)


CHECKS = (
    check_regular_saddle,
    check_singular_saddle_1,
    check_singular_saddle_2,
    check_singular_saddle_2_perturbed,
    check_second_order_saddle,
    check_not_saddle,
    check_non_t_stationary,
    check_scholtes,
)


def run_all() -> list[Check]:
    return [check() for check in CHECKS]
