import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from snostat import catalog
from snostat.errors import InfeasiblePointError, SnoError
from snostat.problem import (
    ConeKind,
    Reduction,
    SnoProblem,
    Status,
    active_pattern,
    cone_distance,
    cone_membership,
    cone_project,
    feasible,
    load_problem,
)

C, V, O, S, D = (ConeKind.COMPLEMENTARITY, ConeKind.VANISHING, ConeKind.ORTHOGONALITY,
                 ConeKind.SWITCHING, ConeKind.DISJUNCTIVE)
CONES = list(ConeKind)


def axes_problem(cone):
    return SnoProblem.from_strings(2, "x1 + x2", [("x1", "x2")], cone)


class TestMembership:
    def test_origin_in_every_cone(self):
        assert all(cone_membership(c, (0, 0), 1e-9) for c in CONES)

    def test_complementarity_rejects_positive_pair(self):
        assert not cone_membership(C, (1, 1), 1e-9)

    def test_disjunctive_accepts_mixed_signs(self):
        assert cone_membership(D, (-1, 2), 1e-9)
        assert not cone_membership(D, (-1, -2), 1e-9)

    @pytest.mark.parametrize(
        "cone, inside, outside",
        [
            (C, [(2, 0), (0, 3)], [(-1, 0), (1, 1)]),
            (V, [(2, -1), (0, 5), (0, -5), (3, 0)], [(1, 1), (-1, 0)]),
            (O, [(-2, 0), (0, 3)], [(0, -1), (1, 1)]),
            (S, [(-2, 0), (0, -3)], [(1, -1)]),
            (D, [(5, -3), (-3, 0)], [(-0.1, -0.1)]),
        ],
    )
    def test_definitions(self, cone, inside, outside):
        assert all(cone_membership(cone, a) for a in inside)
        assert not any(cone_membership(cone, a) for a in outside)

    def test_negative_tolerance_rejected(self):
        with pytest.raises(ValueError):
            cone_membership(C, (0, 0), -1.0)


class TestProjection:
    def test_examples(self):
        assert cone_project(C, (2, 1)) == (2, 0)
        assert cone_project(S, (1, 1)) == (1, 0)
        assert cone_project(D, (-1, -2)) == (0, -2)

    def test_tie_prefers_larger_coordinate_then_first_axis(self):
        assert cone_project(C, (-1, -1)) == (0, 0)
        assert cone_project(S, (-1, -1)) == (-1, 0)
        assert cone_project(D, (-1, -1)) == (0, -1)

    @pytest.mark.parametrize("cone", CONES)
    def test_fixed_points(self, cone):
        rng = np.random.default_rng(1)
        for a in rng.normal(size=(300, 2)) * 3:
            for pt in [(a[0], 0.0), (0.0, a[1]), tuple(a)]:
                if cone_membership(cone, pt, 0.0):
                    assert cone_project(cone, pt) == pytest.approx(pt)

    @staticmethod
    def _cone_samples(cone, rng, count=1000):
        """Points of the cone found by rejection from axes and the plane."""
        t = rng.uniform(-6, 6, (count * 3, 2))
        raw = np.concatenate([
            np.column_stack([t[:count, 0], np.zeros(count)]),
            np.column_stack([np.zeros(count), t[count:2 * count, 1]]),
            t[2 * count:],
        ])
        keep = [pt for pt in raw if cone_membership(cone, pt, 0.0)]
        return np.array(keep)

    @pytest.mark.parametrize("cone", CONES)
    def test_projection_against_sampling(self, cone):
        rng = np.random.default_rng(CONES.index(cone))
        samples = self._cone_samples(cone, rng)
        assert len(samples) >= 1000
        samples = samples[:1000]
        points = rng.uniform(-5, 5, (10_000, 2))
        for a in points:
            proj = cone_project(cone, a)
            assert cone_membership(cone, proj, 1e-12)
            dist = np.hypot(*(a - proj))
            nearest = np.min(np.hypot(*(samples - a).T))
            assert dist <= nearest + 1e-12

    @pytest.mark.parametrize("cone", CONES)
    def test_distance_matches_projection(self, cone):
        rng = np.random.default_rng(5)
        pts = rng.uniform(-3, 3, (500, 2))
        d = cone_distance(cone, pts[:, 0], pts[:, 1])
        ref = [np.hypot(*(a - cone_project(cone, a))) for a in pts]
        assert np.allclose(d, ref, atol=1e-14)


class TestFeasibility:
    def test_examples(self):
        p = catalog.regular_saddle()
        assert feasible(p, (1, 0), 1e-8)
        assert not feasible(p, (0.5, 0.5), 1e-8)
        assert feasible(p, (0, 0), 1e-8)

    @settings(max_examples=200, deadline=None)
    @given(
        x=st.tuples(st.floats(-1, 1), st.floats(-1, 1)),
        t1=st.floats(0, 1),
        t2=st.floats(0, 1),
        cone=st.sampled_from(CONES),
    )
    def test_monotone_in_tolerance(self, x, t1, t2, cone):
        lo, hi = sorted((t1, t2))
        p = axes_problem(cone)
        if feasible(p, x, lo):
            assert feasible(p, x, hi)


class TestActivePattern:
    def test_biactive_origin(self):
        pat = active_pattern(catalog.regular_saddle(), (0, 0))
        assert pat.statuses == (Status.BIACTIVE,)
        assert pat.biactive == (0,)

    def test_second_active(self):
        pat = active_pattern(catalog.regular_saddle(), (1, 0))
        assert pat.statuses == (Status.SECOND_ACTIVE,)
        assert [c.which for c in pat.components] == [2]

    def test_disjunctive_locally_inactive(self):
        pat = active_pattern(axes_problem(D), (0, 1))
        assert pat.statuses == (Status.INACTIVE,)
        assert pat.components == ()

    def test_infeasible_point(self):
        with pytest.raises(InfeasiblePointError):
            active_pattern(catalog.regular_saddle(), (0.3, 0.3))

    # Branch points and the local relation that must describe the cone near them.
    BRANCHES = [
        (C, (0, 1), Reduction.EQ), (C, (1, 0), Reduction.EQ),
        (V, (0, 1), Reduction.EQ), (V, (0, -1), Reduction.GE), (V, (1, 0), Reduction.LE),
        (O, (0, 1), Reduction.EQ), (O, (1, 0), Reduction.EQ), (O, (-1, 0), Reduction.EQ),
        (S, (0, 1), Reduction.EQ), (S, (0, -1), Reduction.EQ), (S, (-1, 0), Reduction.EQ),
        (D, (0, -1), Reduction.GE), (D, (-1, 0), Reduction.GE),
    ]

    @pytest.mark.parametrize("cone, point, reduction", BRANCHES)
    def test_branch_table_against_local_geometry(self, cone, point, reduction):
        pat = active_pattern(axes_problem(cone), point)
        (comp,) = pat.components
        assert comp.reduction is reduction
        rng = np.random.default_rng(9)
        k = comp.which - 1
        for _ in range(2000):
            a = np.array(point, dtype=float) + rng.uniform(-0.1, 0.1, 2)
            if rng.random() < 0.3:
                a[k] = 0.0
            v = a[k]
            expected = {Reduction.EQ: v == 0, Reduction.GE: v >= 0, Reduction.LE: v <= 0}[reduction]
            assert cone_membership(cone, a, 0.0) == expected, (a, cone)


class TestProblemFiles:
    def test_round_trip(self, tmp_path):
        p = catalog.singular_saddle_1()
        path = tmp_path / "p.json"
        path.write_text(json.dumps(p.to_dict()))
        q = load_problem(path)
        assert q.n == 2 and q.cone is C
        for x in [(0.3, -0.2), (1.0, 2.0)]:
            assert q.f(x) == pytest.approx(p.f(x))

    def test_bundled_files_load(self):
        from pathlib import Path

        files = sorted(Path(__file__).parent.parent.joinpath("problems").glob("*.json"))
        assert files
        for f in files:
            load_problem(f)

    @pytest.mark.parametrize("data", [
        {"n": 2, "cone": "complementarity", "objective": "x1"},
        {"n": 2, "cone": "elliptic", "objective": "x1", "constraints": [{"F1": "x1", "F2": "x2"}]},
        {"n": 2, "cone": "switching", "objective": "x1", "constraints": []},
        [1, 2],
    ])
    def test_malformed(self, tmp_path, data):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(data))
        with pytest.raises(SnoError):
            load_problem(path)
