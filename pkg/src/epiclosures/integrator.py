"""Adaptive explicit Runge-Kutta integration for autonomous ODE systems.

Thin layer over scipy's embedded RK 4(5) pair (Dormand-Prince) adding the
conventions the rest of the package relies on: autonomous right-hand sides
``rhs(y) -> dy``, a step budget, non-finite derivative detection with
location reporting, and derivative-plateau termination for steady-state
searches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    IntegrationError,
    NonFiniteDerivativeError,
    ParameterError,
    StepBudgetError,
)

# RK45 spends 6 stage evaluations per attempted step; one extra per step
# covers the initial evaluation, event evaluations and root polishing.
_EVALS_PER_STEP = 7


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and budgets for one integration run.

    ``max_step`` of None means one tenth of the integration span, chosen at
    call time.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    initial_step: float = 1e-3
    max_step: float | None = None
    max_steps: int = 10_000_000

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ParameterError("tolerances must be positive")
        if self.initial_step <= 0:
            raise ParameterError("initial_step must be positive")
        if self.max_step is not None and self.initial_step > self.max_step:
            raise ParameterError("initial_step must not exceed max_step")
        if self.max_steps < 1:
            raise ParameterError("max_steps must be at least 1")


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class Trajectory:
    """Numerical solution samples.

    ``dense`` is True when the rows of ``states`` sit on user-requested
    output times (interpolated by the solver's dense output) and False when
    they are the solver's own accepted steps.
    """

    times: np.ndarray
    states: np.ndarray
    dense: bool

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        states = np.asarray(self.states, dtype=float)
        if times.ndim != 1 or states.ndim != 2 or states.shape[0] != times.shape[0]:
            raise ParameterError("states must have one row per time sample")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ParameterError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "states", states)


@dataclass(frozen=True)
class SteadyResult:
    """Outcome of a steady-state search.

    ``reason`` is "plateau" when the derivative criterion fired and "t_max"
    when the time horizon ran out first (``converged`` False in that case).
    """

    state: np.ndarray
    time: float
    converged: bool
    reason: str


class _CountingRhs:
    """Wraps an autonomous rhs with a budget and finite-value checking."""

    def __init__(self, rhs, shape, max_evals: int):
        self._rhs = rhs
        self._shape = shape
        self._max_evals = max_evals
        self.evals = 0

    def __call__(self, t, y):
        self.evals += 1
        if self.evals > self._max_evals:
            raise StepBudgetError(
                f"step budget exhausted after {self.evals - 1} derivative "
                f"evaluations (t={t:.6g})"
            )
        dy = np.asarray(self._rhs(y), dtype=float).reshape(self._shape)
        if not np.all(np.isfinite(dy)):
            bad = int(np.flatnonzero(~np.isfinite(dy))[0])
            raise NonFiniteDerivativeError(time=float(t), component=bad)
        return dy


def _prepare(y0, t_span, config: IntegratorConfig):
    y0 = np.atleast_1d(np.asarray(y0, dtype=float))
    if not np.all(np.isfinite(y0)):
        raise ParameterError("initial state must be finite")
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t0 < t1:
        raise ParameterError(f"need t0 < t1, got span ({t0}, {t1})")
    max_step = config.max_step if config.max_step is not None else (t1 - t0) / 10.0
    first_step = min(config.initial_step, max_step, t1 - t0)
    return y0, t0, t1, max_step, first_step


def integrate(rhs, y0, t_span, output_times=None,
              config: IntegratorConfig = DEFAULT_CONFIG) -> Trajectory:
    """Integrate ``dy/dt = rhs(y)`` over ``t_span = (t0, t1)``.

    When ``output_times`` is given the solution is sampled exactly there
    (they must be increasing and lie inside the span); otherwise the
    accepted solver steps are returned.
    """
    y0, t0, t1, max_step, first_step = _prepare(y0, t_span, config)

    t_eval = None
    if output_times is not None:
        t_eval = np.asarray(output_times, dtype=float)
        if t_eval.ndim != 1 or t_eval.size == 0:
            raise ParameterError("output_times must be a nonempty 1-d sequence")
        if t_eval.size > 1 and not np.all(np.diff(t_eval) > 0):
            raise ParameterError("output_times must be strictly increasing")
        if t_eval[0] < t0 or t_eval[-1] > t1:
            raise ParameterError("output_times must lie within t_span")

    f = _CountingRhs(rhs, y0.shape, _EVALS_PER_STEP * config.max_steps)
    sol = solve_ivp(
        f, (t0, t1), y0, method="RK45", t_eval=t_eval,
        rtol=config.rel_tol, atol=config.abs_tol,
        first_step=first_step, max_step=max_step,
    )
    if sol.status != 0:
        raise IntegrationError(f"integration failed: {sol.message}")
    return Trajectory(times=sol.t, states=sol.y.T, dense=t_eval is not None)


def integrate_to_steady(rhs, y0, config: IntegratorConfig = DEFAULT_CONFIG,
                        plateau_tol: float = 1e-9,
                        t_max: float = 1e6) -> SteadyResult:
    """Integrate until the derivative plateaus or ``t_max`` is reached.

    The plateau criterion is ``max|rhs(y)| <= plateau_tol * (1 + max|y|)``,
    located by a terminal event on the integration.  The returned result
    records which of the two stopping conditions fired.
    """
    if plateau_tol <= 0:
        raise ParameterError("plateau_tol must be positive")
    y0, t0, t1, max_step, first_step = _prepare(y0, (0.0, t_max), config)

    f = _CountingRhs(rhs, y0.shape, _EVALS_PER_STEP * config.max_steps)

    def plateau(t, y):
        dy = f(t, y)
        return float(np.max(np.abs(dy)) - plateau_tol * (1.0 + np.max(np.abs(y))))

    if plateau(t0, y0) <= 0.0:
        return SteadyResult(state=y0, time=t0, converged=True, reason="plateau")

    plateau.terminal = True
    plateau.direction = -1
    sol = solve_ivp(
        f, (t0, t1), y0, method="RK45", events=plateau,
        rtol=config.rel_tol, atol=config.abs_tol,
        first_step=first_step, max_step=max_step,
    )
    if sol.status == 1:
        return SteadyResult(
            state=sol.y_events[0][0], time=float(sol.t_events[0][0]),
            converged=True, reason="plateau",
        )
    if sol.status == 0:
        return SteadyResult(
            state=sol.y[:, -1], time=t1, converged=False, reason="t_max",
        )
    raise IntegrationError(f"integration failed: {sol.message}")
