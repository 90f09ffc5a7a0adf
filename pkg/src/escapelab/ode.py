"""Deterministic trajectories of the three-species system.

Integration runs in log-coordinates for v and v* whenever both are
strictly positive: the densities span O(1) down to exp(-O(1/eps)) inside
the stage-II/IV troughs, and absolute error control on log v is relative
control on v at every depth.  States with an exactly-zero coordinate are
integrated in raw coordinates, where the vector field keeps the zero
coordinate identically zero (invariant manifolds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .params import ModelParams, ParamError, SystemState

__all__ = ["OdeTrajectory", "StiffnessError", "integrate_ode"]

_LOG_TINY = -745.0  # exp underflows to 0 below this; good enough for "zero"


class StiffnessError(RuntimeError):
    """Integrator step-size underflow; message carries the failure time."""


@dataclass
class OdeTrajectory:
    """Solver-node samples plus a dense interpolant of one ODE solution."""

    times: np.ndarray
    states: np.ndarray  # (n, 3) columns v, vstar, p
    dt_policy: str
    mp: ModelParams
    log_space: bool
    _sol: object  # scipy OdeSolution in the integration coordinates

    def state_at(self, t):
        """Dense-output state (v, vstar, p) at time t (scalar or array)."""
        y = self._sol(t)
        if self.log_space:
            return np.array([np.exp(y[0]), np.exp(y[1]), y[2]])
        return np.asarray(y)

    def final_state(self) -> SystemState:
        v, vs, p = self.states[-1]
        return SystemState(float(v), float(vs), float(p), t=float(self.times[-1]))

    def deriv_at(self, t):
        """Vector field along the trajectory at time t, in (v, vstar, p)."""
        v, vs, p = self.state_at(t)
        mp = self.mp
        return np.array(
            [
                v * (1.0 - (v + vs) - p),
                vs * (mp.f - (v + vs)),
                mp.epsilon * p * (v - mp.alpha * p),
            ]
        )


def _rhs_log(t, y, f, alpha, eps):
    v = math.exp(y[0]) if y[0] > _LOG_TINY else 0.0
    vs = math.exp(y[1]) if y[1] > _LOG_TINY else 0.0
    p = y[2]
    tot = v + vs
    return (1.0 - tot - p, f - tot, eps * p * (v - alpha * p))


def _rhs_raw(t, y, f, alpha, eps):
    v, vs, p = y
    tot = v + vs
    return (v * (1.0 - tot - p), vs * (f - tot), eps * p * (v - alpha * p))


def integrate_ode(mp: ModelParams, u0: SystemState, t_end: float,
                  tol: float = 1e-10, max_step: float | None = None) -> OdeTrajectory:
    """Adaptive embedded Runge-Kutta solution from u0 up to at least t_end."""
    if not (1e-14 < tol < 1e-2):
        raise ParamError(f"tol must lie in (1e-14, 1e-2), got {tol}")
    if t_end <= u0.t:
        raise ParamError("t_end must exceed the initial time")
    log_space = u0.v > 0.0 and u0.vstar > 0.0
    args = (mp.f, mp.alpha, mp.epsilon)
    if max_step is None:
        # plenty to resolve every stage transition; integration is cheap
        max_step = min(5.0, (t_end - u0.t) / 16.0) if t_end - u0.t > 1e-6 else np.inf
    if log_space:
        y0 = [math.log(u0.v), math.log(u0.vstar), u0.p]
        sol = solve_ivp(
            _rhs_log, (u0.t, t_end), y0, args=args, method="RK45",
            rtol=tol, atol=tol, dense_output=True, max_step=max_step,
        )
    else:
        sol = solve_ivp(
            _rhs_raw, (u0.t, t_end), list(u0.as_tuple()), args=args, method="RK45",
            rtol=tol, atol=tol * 1e-4, dense_output=True, max_step=max_step,
        )
    if not sol.success:
        raise StiffnessError(f"integration stalled at t = {sol.t[-1]:.6g}: {sol.message}")
    if log_space:
        states = np.column_stack([np.exp(sol.y[0]), np.exp(sol.y[1]), sol.y[2]])
    else:
        states = np.clip(sol.y.T, 0.0, None)
    return OdeTrajectory(
        times=sol.t.copy(),
        states=states,
        dt_policy=f"rk45-embedded rtol={tol} atol={tol} "
                  f"{'log(v),log(v*),p' if log_space else 'raw'} max_step={max_step}",
        mp=mp,
        log_space=log_space,
        _sol=sol.sol,
    )
