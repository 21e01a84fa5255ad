"""Damped Newton iteration for small square nonlinear systems."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError

MAX_ITER = 50
STEP_TOL = 1e-12
RES_TOL = 1e-10
MAX_HALVINGS = 30
SHORT_STEP = 2.0**-10
MAX_SHORT_STEPS = 5
STALL_RATIO = 0.999


@dataclass
class NewtonResult:
    z: np.ndarray
    residual: float
    converged: bool
    iterations: int


def _safe(fun, z):
    try:
        r, J = fun(z)
    except (DomainError, FloatingPointError, OverflowError):
        return None, None
    if not np.all(np.isfinite(r)):
        return None, None
    return r, J


def newton_direction(J, r):
    """Least-squares Newton step after row and column equilibration.

    Scaling matters on regularization paths, where multipliers grow like
    ``1/sqrt(t)`` while the unknowns shrink like ``sqrt(t)``.
    """
    if J.size == 0:
        return np.zeros(J.shape[1])
    rows = np.max(np.abs(J), axis=1)
    rows[rows == 0] = 1.0
    Js = J / rows[:, None]
    cols = np.max(np.abs(Js), axis=0)
    cols[cols == 0] = 1.0
    y = np.linalg.lstsq(Js / cols, -r / rows, rcond=None)[0]
    return y / cols


def _iterate(fun, z, r, J, max_iter, step_tol, damped):
    norm = float(np.linalg.norm(r))
    blowup = 1e8 * (1.0 + norm)
    it = stalled = 0
    for it in range(1, max_iter + 1):
        if norm == 0.0:
            break
        d = newton_direction(J, r)
        alpha = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS if damped else 1):
            z_new = z + alpha * d
            r_new, J_new = _safe(fun, z_new)
            if r_new is not None:
                norm_new = float(np.linalg.norm(r_new))
                if not damped or norm_new < norm or norm_new == 0.0:
                    accepted = norm_new <= blowup
                    break
            alpha *= 0.5
        if not accepted:
            break
        # A run of tiny or unproductive damped steps means we are sliding into a local
        # minimum of the residual, not towards a root.
        stalled = stalled + 1 if alpha < SHORT_STEP or norm_new > STALL_RATIO * norm else 0
        if stalled >= MAX_SHORT_STEPS:
            z, r, J, norm = z_new, r_new, J_new, norm_new
            break
        step = alpha * float(np.max(np.abs(d))) if d.size else 0.0
        z, r, J, norm = z_new, r_new, J_new, norm_new
        if step <= step_tol * (1.0 + float(np.max(np.abs(z)))):
            break
    return z, norm, it


def damped_newton(
    fun: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    z0,
    max_iter: int = MAX_ITER,
    step_tol: float = STEP_TOL,
    res_tol: float = RES_TOL,
) -> NewtonResult:
    """Solve ``r(z) = 0`` where ``fun(z)`` returns ``(r, dr/dz)``.

    The Newton direction is a least-squares solve, so singular Jacobians at
    degenerate roots still give a usable step.  Plain Newton steps are tried
    first; the residual of a curved system often rises for a step or two
    before quadratic convergence sets in.  If that run does not converge the
    iteration restarts from ``z0`` with steps halved until the residual norm
    decreases.  Both runs stop on a tiny step rather than on the first small
    residual, so slowly converging degenerate roots are polished as far as the
    budget allows.
    """
    z0 = np.array(z0, dtype=float)
    r, J = _safe(fun, z0)
    if r is None:
        return NewtonResult(z0, float("inf"), False, 0)
    z, norm, it = _iterate(fun, z0, r, J, max_iter, step_tol, damped=False)
    if norm <= res_tol:
        return NewtonResult(z, norm, True, it)
    z, norm, it2 = _iterate(fun, z0, r, J, max_iter, step_tol, damped=True)
    return NewtonResult(z, norm, norm <= res_tol, it + it2)
