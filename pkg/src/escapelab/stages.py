"""Stage decomposition of a trajectory and the per-cycle damping sequence.

A cycle is delimited by hitting times of the detection level eps**q:
T_s (v* rises through it), T_I (v falls to it), T_II (v recovers to it),
T_III (v* falls to it), T_IV (v* recovers to it; the next cycle's T_s).
Oscillations damp, so later cycles may never reach eps**q -- those simply
do not appear.  The damping sequence instead marks cycle starts by the
local maxima of p, which exist for every oscillation: at a p-maximum
v = alpha p, which is exactly the cycle-start configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .ode import OdeTrajectory
from .params import ModelParams

__all__ = ["StageTimes", "AmbiguousCrossingError", "DampingError",
           "detect_stages", "damping_check", "find_crossings"]


class AmbiguousCrossingError(RuntimeError):
    """Threshold grazed tangentially within tolerance; not silently resolved."""


class DampingError(RuntimeError):
    pass


@dataclass(frozen=True)
class StageTimes:
    cycle: int
    T_s: float
    T_I: float
    T_II: float
    T_III: float
    T_IV: float
    threshold: float

    def ordered(self) -> bool:
        return self.T_s < self.T_I < self.T_II < self.T_III < self.T_IV


def find_crossings(traj: OdeTrajectory, coord: int, level: float,
               transversality: float = 1e-9):
    """All (time, direction) crossings of density `coord` through level.

    Sign changes on the solver-node grid are refined by bisection on the
    dense output.  In log coordinates the crossing function is
    log x - log level, which stays well conditioned at tiny levels.  A
    crossing whose transversal speed cannot lift the trajectory out of
    the 1e-3 tolerance band within one node interval is ambiguous.
    """
    if traj.log_space:
        target = math.log(level)
        g = np.log(np.clip(traj.states[:, coord], 1e-320, None)) - target
        func = lambda tt: float(traj._sol(tt)[coord]) - target
        band = 1e-3  # |log x - q log eps| <= 1e-3 ~ relative band on x
    else:
        target = level
        g = traj.states[:, coord] - target
        func = lambda tt: float(traj._sol(tt)[coord]) - target
        band = 1e-3 * level
    t = traj.times
    out = []
    for i in range(len(t) - 1):
        a, b = g[i], g[i + 1]
        if a == 0.0:
            a = -1e-300 if b > 0 else 1e-300
        if a * b < 0:
            tc = brentq(func, t[i], t[i + 1], xtol=1e-12 * max(1.0, t[i + 1]))
            dt_node = t[i + 1] - t[i]
            h = 1e-6 * dt_node
            speed = abs(func(min(tc + h, t[i + 1])) - func(max(tc - h, t[i]))) / (2 * h)
            if speed * dt_node < transversality * band:
                raise AmbiguousCrossingError(
                    f"coordinate {coord} grazes level {level:g} near t = {tc:.6g}"
                )
            out.append((tc, 1 if b > a else -1))
    return out


def detect_stages(traj: OdeTrajectory, mp: ModelParams) -> list[StageTimes]:
    """Hitting-time cycles of the eps**q level, in order.

    Returns [] when v never falls to the level.  The first T_s is the
    first up-crossing of v* (or the trajectory start if v* already sits
    at/above the level, the caller-designated cycle start).
    """
    level = mp.threshold
    v_cross = find_crossings(traj, 0, level)
    if not any(d < 0 for _, d in v_cross):
        return []
    vs_cross = find_crossings(traj, 1, level)

    t0 = traj.times[0]
    vs0 = traj.states[0, 1]
    starts = [tc for tc, d in vs_cross if d > 0]
    if vs0 >= level:
        starts = [t0] + starts
    v_down = [tc for tc, d in v_cross if d < 0]
    v_up = [tc for tc, d in v_cross if d > 0]
    vs_down = [tc for tc, d in vs_cross if d < 0]

    def first_after(seq, t):
        for x in seq:
            if x > t:
                return x
        return None

    cycles: list[StageTimes] = []
    k = 0
    while k < len(starts):
        T_s = starts[k]
        T_I = first_after(v_down, T_s)
        if T_I is None:
            break
        T_II = first_after(v_up, T_I)
        if T_II is None:
            break
        T_III = first_after(vs_down, T_II)
        if T_III is None:
            break
        T_IV = first_after(starts, T_III)
        if T_IV is None:
            break
        cycles.append(StageTimes(len(cycles) + 1, T_s, T_I, T_II, T_III, T_IV, level))
        # next cycle starts at T_IV
        k = starts.index(T_IV)
    return cycles


def damping_check(traj: OdeTrajectory, mp: ModelParams) -> list[float]:
    """|p(cycle start) - (1-f)| per cycle; must be strictly decreasing.

    Cycle starts are the successive local maxima of p (where v = alpha p),
    including t = 0 when the trajectory starts at a maximum.
    """
    a, f = mp.alpha, mp.f
    t, states = traj.times, traj.states
    g = states[:, 0] - a * states[:, 2]  # sign of dp/dt

    def gfun(tt):
        v, vs, p = traj.state_at(tt)
        return float(v - a * p)

    maxima: list[float] = []
    if g[0] <= 0 or gfun(t[0] + 1e-9 * (t[-1] - t[0])) < 0:
        maxima.append(t[0])
    for i in range(len(t) - 1):
        if g[i] > 0 and g[i + 1] <= 0:
            tc = brentq(gfun, t[i], t[i + 1], xtol=1e-10 * max(1.0, t[i + 1]))
            if not maxima or tc - maxima[-1] > 1.0:  # collapse numerical twins
                maxima.append(tc)
    if len(maxima) < 2:
        raise DampingError(f"fewer than 2 cycles detected ({len(maxima)} p-maxima)")
    devs = []
    for tm in maxima:
        p = float(traj.state_at(tm)[2])
        devs.append(abs(p - (1.0 - f)))
    return devs
