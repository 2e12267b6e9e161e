"""Damped nonlinear least squares (Levenberg-Marquardt).

Minimises the sum of squared residuals of a user-supplied residual
function.  The Jacobian is formed by forward finite differences so the
residual may wrap an arbitrary inner pipeline.  Steps solve

    (J^T J + lambda I) delta = -J^T r

and the damping factor lambda shrinks after accepted steps and grows
after rejected ones, which makes the accepted cost sequence monotone
non-increasing by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NonFiniteResidualError

ResidualFn = Callable[[np.ndarray], np.ndarray]


@dataclass
class LmOptions:
    initial_damping: float = 1e-3
    damping_increase: float = 10.0
    damping_decrease: float = 0.1
    gradient_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    max_iterations: int = 200
    finite_difference_step: float = 1e-7

    def __post_init__(self):
        if min(self.initial_damping, self.damping_increase, self.damping_decrease,
               self.gradient_tolerance, self.step_tolerance,
               self.max_iterations, self.finite_difference_step) <= 0:
            raise ValueError("all solver options must be positive")
        if not self.damping_increase > 1.0 > self.damping_decrease:
            raise ValueError("damping factors must bracket 1")


@dataclass
class LmResult:
    solution: np.ndarray
    final_cost: float
    iterations: int
    converged: bool
    gradient_norm: float


def _residuals(fn: ResidualFn, x: np.ndarray) -> np.ndarray:
    r = np.atleast_1d(np.asarray(fn(x), dtype=float))
    if not np.all(np.isfinite(r)):
        raise NonFiniteResidualError(f"residual not finite at x={x}")
    return r


def _jacobian(fn: ResidualFn, x: np.ndarray, r0: np.ndarray, fd_step: float) -> np.ndarray:
    jac = np.empty((r0.size, x.size))
    for i in range(x.size):
        h = fd_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += h
        jac[:, i] = (_residuals(fn, xp) - r0) / h
    return jac


def solve(residual_fn: ResidualFn, x0: np.ndarray, opts: LmOptions | None = None) -> LmResult:
    """Run Levenberg-Marquardt from ``x0``.

    Terminates when the cost gradient norm drops below
    ``gradient_tolerance``, when an accepted step is shorter than
    ``step_tolerance`` (relative to the iterate size), or after
    ``max_iterations``, in which case the best iterate found so far is
    returned with ``converged=False``.  Deterministic: identical inputs
    produce the identical iterate sequence.
    """
    opts = opts or LmOptions()
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()
    r = _residuals(residual_fn, x)
    cost = float(r @ r)
    lam = opts.initial_damping
    grad_norm = np.inf
    converged = False
    iterations = 0  # counts accepted steps

    while iterations < opts.max_iterations:
        jac = _jacobian(residual_fn, x, r, opts.finite_difference_step)
        grad = 2.0 * jac.T @ r  # gradient of sum of squared residuals
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= opts.gradient_tolerance:
            converged = True
            break

        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        any_finite_trial = False
        while lam < 1e12:
            try:
                delta = np.linalg.solve(jtj + lam * np.eye(x.size), -jtr)
            except np.linalg.LinAlgError:
                lam *= opts.damping_increase
                continue
            try:
                r_new = _residuals(residual_fn, x + delta)
            except NonFiniteResidualError:
                # Trial point left the residual's domain; shorten the step.
                lam *= opts.damping_increase
                continue
            any_finite_trial = True
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                step = float(np.linalg.norm(delta))
                x = x + delta
                r = r_new
                cost = cost_new
                lam = max(lam * opts.damping_decrease, 1e-15)
                accepted = True
                iterations += 1
                if step <= opts.step_tolerance * (np.linalg.norm(x) + opts.step_tolerance):
                    converged = True
                break
            lam *= opts.damping_increase
        if not accepted:
            if not any_finite_trial:
                raise NonFiniteResidualError(
                    "residual not finite for any trial step from the current iterate")
            # No damping level yields an improvement: stationary for our purposes.
            converged = True
            break
        if converged:
            break

    return LmResult(solution=x, final_cost=cost, iterations=iterations,
                    converged=converged, gradient_norm=grad_norm)
