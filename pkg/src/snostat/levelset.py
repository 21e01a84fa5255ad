"""Connected components of lower level sets on a thickened grid (2-D only).

The feasible sets of most cones are unions of curves, so a cell counts as
feasible when every constraint image lies within ``feas_scale * h`` of the
cone.  Component counts across a sweep of levels are then compared with the
objective values of the T-stationary points found by the stratified scan.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import ndimage

from . import expr as ex
from .errors import DomainError, UnsupportedConeError
from .problem import SnoProblem, cone_distance

MIN_RESOLUTION = 16
FEAS_SCALE = 1.5
EIGHT_CONNECTED = np.ones((3, 3), dtype=int)


@dataclass(frozen=True)
class LevelEntry:
    a: float
    components: int
    feasible_cells: int


@dataclass(frozen=True)
class ChangeLevel:
    level: float
    before: int
    after: int
    nearest_critical_value: Optional[float]
    gap: Optional[float]


@dataclass
class LevelProfile:
    box: tuple[tuple[float, float], ...]
    resolution: int
    entries: list[LevelEntry] = field(default_factory=list)
    changes: list[ChangeLevel] = field(default_factory=list)
    critical_values: list[float] = field(default_factory=list)

    @property
    def change_levels(self) -> list[float]:
        return [c.level for c in self.changes]

    @property
    def counts(self) -> list[int]:
        return [e.components for e in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "components", "feasible_cells"])
        for e in self.entries:
            w.writerow([repr(e.a), e.components, e.feasible_cells])
        return buf.getvalue()

    def summary(self) -> dict:
        """The companion JSON document of the CSV table."""
        return {
            "box": [list(b) for b in self.box],
            "resolution": self.resolution,
            "critical_values": self.critical_values,
            "change_levels": [
                {
                    "level": c.level,
                    "before": c.before,
                    "after": c.after,
                    "nearest_critical_value": c.nearest_critical_value,
                    "gap": c.gap,
                }
                for c in self.changes
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _check(p: SnoProblem, resolution: int):
    if p.n != 2:
        raise UnsupportedConeError(f"level-set analysis needs n = 2, got n = {p.n}")
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be at least {MIN_RESOLUTION}, got {resolution}")


def _grid_values(e: ex.Expr, X, Y):
    """Evaluate ``e`` on the grid; cells outside the domain become NaN."""
    try:
        return np.broadcast_to(np.asarray(ex.evaluate(e, (X, Y)), dtype=float), X.shape)
    except DomainError:
        out = np.full(X.shape, np.nan)
        for idx in np.ndindex(X.shape):
            try:
                out[idx] = ex.evaluate(e, (X[idx], Y[idx]))
            except DomainError:
                pass
        return out


@dataclass(frozen=True)
class _Grid:
    f: np.ndarray
    feasible: np.ndarray


def _grid(p: SnoProblem, box, resolution: int, feas_scale: float) -> _Grid:
    (lo1, hi1), (lo2, hi2) = box
    h1, h2 = (hi1 - lo1) / resolution, (hi2 - lo2) / resolution
    c1 = lo1 + (np.arange(resolution) + 0.5) * h1
    c2 = lo2 + (np.arange(resolution) + 0.5) * h2
    X, Y = np.meshgrid(c1, c2, indexing="ij")
    with np.errstate(all="ignore"):
        f = _grid_values(p.objective, X, Y)
        feasible = np.isfinite(f)
        radius = feas_scale * max(h1, h2)
        for F1, F2 in p.pairs:
            d = cone_distance(p.cone, _grid_values(F1, X, Y), _grid_values(F2, X, Y))
            feasible &= np.nan_to_num(d, nan=np.inf) <= radius
    return _Grid(f, feasible)


def _count(grid: _Grid, a: float) -> tuple[int, int]:
    with np.errstate(invalid="ignore"):
        mask = grid.feasible & (grid.f <= a)
    _, count = ndimage.label(mask, structure=EIGHT_CONNECTED)
    return int(count), int(mask.sum())


def _normalize_box(box):
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    if len(box) != 2:
        raise UnsupportedConeError("level-set analysis needs a two-dimensional box")
    return box


def grid_components(
    p: SnoProblem, box, resolution: int, a: float, feas_scale: float = FEAS_SCALE
) -> tuple[int, int]:
    """Number of 8-connected components of the marked cells, and the number of marked cells."""
    _check(p, resolution)
    box = _normalize_box(box)
    if any(lo >= hi for lo, hi in box):
        return 0, 0
    return _count(_grid(p, box, resolution, feas_scale), a)


def sweep(
    p: SnoProblem,
    box,
    resolution: int,
    a_min: float,
    a_max: float,
    steps: int,
    feas_scale: float = FEAS_SCALE,
    critical_values: Optional[Sequence[float]] = None,
) -> LevelProfile:
    """Component counts on ``steps`` uniform levels from ``a_min`` to ``a_max``.

    ``critical_values`` defaults to the objective values of the T-stationary
    points that the stratified scan finds in ``box``.
    """
    _check(p, resolution)
    if not a_min < a_max:
        raise ValueError("a_min must be smaller than a_max")
    if steps < 2:
        raise ValueError("a sweep needs at least two levels")
    box = _normalize_box(box)
    if critical_values is None:
        from .scan import stratified_scan

        critical_values = [r.value for r in stratified_scan(p, box).t_stationary()]
    crit = sorted({float(v) for v in critical_values})
    profile = LevelProfile(box, resolution, critical_values=crit)

    levels = np.linspace(a_min, a_max, steps)
    empty = any(lo >= hi for lo, hi in box)
    grid = None if empty else _grid(p, box, resolution, feas_scale)
    for a in levels:
        count, cells = (0, 0) if grid is None else _count(grid, float(a))
        profile.entries.append(LevelEntry(float(a), count, cells))

    for prev, cur in zip(profile.entries, profile.entries[1:]):
        if prev.components == cur.components:
            continue
        mid = 0.5 * (prev.a + cur.a)
        nearest = min(crit, key=lambda v: (abs(v - mid), v)) if crit else None
        gap = abs(nearest - mid) if nearest is not None else None
        profile.changes.append(ChangeLevel(mid, prev.components, cur.components, nearest, gap))
    return profile
