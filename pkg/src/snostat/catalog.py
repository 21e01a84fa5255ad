"""Bundled two-dimensional complementarity instances with known structure.

All instances use ``(F1, F2) = (x1, x2)`` and the complementarity cone, so
the feasible set is the union of the two nonnegative half-axes.
"""

from __future__ import annotations

from .problem import SnoProblem

AXES = [("x1", "x2")]


def _mpcc(objective: str, name: str) -> SnoProblem:
    return SnoProblem.from_strings(2, objective, AXES, "complementarity", name)


def regular_saddle() -> SnoProblem:
    """Origin is a nondegenerate saddle with multipliers (-2, -2)."""
    return _mpcc("(x1-1)^2 + (x2-1)^2", "regular_saddle")


def singular_saddle_1() -> SnoProblem:
    return _mpcc("-x1 + 0.5*x1^2 - x2^2 + 0.5*x2^4", "singular_saddle_1")


def singular_saddle_2(eps: float = 0.0) -> SnoProblem:
    """Origin joins a minimizer and a maximizer; ``eps > 0`` tilts it into a regular saddle."""
    if eps:
        return _mpcc(f"-x1 + 0.5*x1^2 - {eps!r}*x2 + x2^2 - 0.5*x2^4",
                     f"singular_saddle_2_eps{eps!r}")
    return _mpcc("-x1 + 0.5*x1^2 + x2^2 - 0.5*x2^4", "singular_saddle_2")


def second_order_saddle() -> SnoProblem:
    return _mpcc("-x1^2 + 0.5*x1^4 - x2^2 + 0.5*x2^4", "second_order_saddle")


def not_saddle() -> SnoProblem:
    return _mpcc("x1 - 0.5*x1^2 - x2^2 + 0.5*x2^4", "not_saddle")


def not_saddle_companion() -> SnoProblem:
    """Same multipliers at the origin as :func:`not_saddle`, but the origin is a minimizer."""
    return _mpcc("x1 - 0.5*x1^2 + x2^2 - 0.5*x2^4", "not_saddle_companion")


def non_t_stationary() -> SnoProblem:
    return _mpcc("x1 - 0.5*x1^2 - x2 + 0.5*x2^2", "non_t_stationary")


def scholtes() -> SnoProblem:
    """Instance used for the regularization path (same as :func:`regular_saddle`)."""
    p = regular_saddle()
    return SnoProblem(p.n, p.objective, p.pairs, p.cone, "scholtes")


ALL = {
    "regular_saddle": regular_saddle,
    "singular_saddle_1": singular_saddle_1,
    "singular_saddle_2": singular_saddle_2,
    "singular_saddle_2_perturbed": lambda: singular_saddle_2(0.05),
    "second_order_saddle": second_order_saddle,
    "not_saddle": not_saddle,
    "not_saddle_companion": not_saddle_companion,
    "non_t_stationary": non_t_stationary,
    "scholtes": scholtes,
}
