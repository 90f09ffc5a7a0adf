"""Per-stage asymptotic predictors for the deterministic cycle.

Each predictor maps the predator density at stage entry to the predicted
density at stage exit plus a duration estimate, valid to the stated order
in eps.  Stages I/III are the fast collapses of v (resp. v*), where p
moves by O(eps |log eps|); stages II/IV are the O(1/eps) troughs, where p
relaxes along explicit solvable flows and the trough depth is governed by
the positive roots H_II and H_IV.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .asymptotics import bisect_root
from .params import ModelParams, ParamError

__all__ = ["Stage", "StagePrediction", "predict_stage_I", "predict_stage_II",
           "predict_stage_III", "predict_stage_IV"]


class Stage(Enum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"


@dataclass(frozen=True)
class StagePrediction:
    stage: Stage
    duration: float
    p_end: float
    aux: dict = field(default_factory=dict)
    vstar_profile: Callable[[float], float] | None = None  # stage IV only

    def __post_init__(self):
        if not self.duration > 0:
            raise ParamError(f"predicted duration must be positive, got {self.duration}")
        if not (0.0 < self.p_end < 1.0):
            raise ParamError(f"predicted p_end must lie in (0,1), got {self.p_end}")


def _collapse_terms(p: float, alpha: float, f: float) -> tuple[float, float]:
    """The O(eps|log eps|) and O(eps) p-increments shared by stages I and III."""
    dp1 = p * (1.0 - (2.0 + alpha) * p)
    dp2 = p * (1.0 - (1.0 + alpha) * p) * math.log(f) - alpha * p * p * math.log(1.0 - p)
    return dp1, dp2


def predict_stage_I(p_Ts: float, mp: ModelParams) -> StagePrediction:
    """Stage I (v collapses to eps**q while v* rises to ~f).

    p_end = p + (q eps |log eps|/delta) dp1 + (eps/delta) dp2 with
    dp1 = p(1-(2+alpha)p), dp2 = p(1-(1+alpha)p) log f - alpha p^2 log(1-p),
    delta = p - (1-f) > 0.  Only the O(|log eps|/delta) order of the
    duration is asymptotically pinned; the estimate here sums the three
    collapse phases (see _collapse_duration) and is validated empirically
    against the ODE rather than taken as normative.
    """
    a, f, eps, q = mp.alpha, mp.f, mp.epsilon, mp.q
    delta = p_Ts - (1.0 - f)
    if delta <= 0:
        raise ParamError(f"stage I undefined: p(T_s) = {p_Ts} requires delta > 0")
    L = abs(math.log(eps))
    dp1, dp2 = _collapse_terms(p_Ts, a, f)
    p_end = p_Ts + (q * eps * L / delta) * dp1 + (eps / delta) * dp2
    duration = _collapse_duration(p_Ts, p_end, f, q, L)
    return StagePrediction(Stage.I, duration, p_end,
                           aux={"delta": delta, "dp_I_1": dp1, "dp_I_2": dp2})


def _collapse_duration(p_entry: float, p_exit: float, f: float, q: float, L: float) -> float:
    """Three proof sub-intervals, each at its own phase's predator level.

    Rise of the invader to sqrt(eps) at the entry rate, the explicit
    logistic crossover, and the final collapse to eps**q at the exit rate
    |p_exit - (1-f)| (p drifts across the stage, and the last interval
    dominates when the exit gap is small).
    """
    d_entry = abs(p_entry - (1.0 - f))
    d_exit = abs(p_exit - (1.0 - f))
    if d_exit <= 0.0:
        d_exit = d_entry
    return ((q - 0.5) * L / d_entry
            + (L - math.log(f * (1.0 - p_entry))) / d_entry
            + (q - 0.5) * L / d_exit)


def predict_stage_II(p_TI: float, mp: ModelParams) -> StagePrediction:
    """Stage II (the wild-type trough of depth exp(-O(1/eps))).

    H_II is the positive root of (1-f) H = (1/alpha) log(1 + alpha p H);
    duration H_II/eps and p_end = p / (1 + alpha p H_II).
    """
    a, f, eps = mp.alpha, mp.f, mp.epsilon
    if p_TI <= 1.0 - f:
        raise ParamError(f"stage II degenerate: p(T_I) = {p_TI} <= 1-f = {1-f}")

    def g(H):
        return (1.0 - f) * H - math.log(1.0 + a * p_TI * H) / a

    H_II = bisect_root(g, 1e-6, 1.0)
    p_end = p_TI / (1.0 + a * p_TI * H_II)
    return StagePrediction(Stage.II, H_II / eps, p_end, aux={"H_II": H_II})


def predict_stage_III(p_TII: float, mp: ModelParams) -> StagePrediction:
    """Stage III (v* collapses while v recovers); mirror of stage I with |delta|."""
    a, f, eps, q = mp.alpha, mp.f, mp.epsilon, mp.q
    delta = p_TII - (1.0 - f)
    if delta >= 0:
        raise ParamError(f"stage III undefined: p(T_II) = {p_TII} requires delta < 0")
    L = abs(math.log(eps))
    dp1, dp2 = _collapse_terms(p_TII, a, f)
    p_end = p_TII + (q * eps * L / abs(delta)) * dp1 + (eps / abs(delta)) * dp2
    duration = _collapse_duration(p_TII, p_end, f, q, L)
    return StagePrediction(Stage.III, duration, p_end,
                           aux={"delta": delta, "dp_III_1": dp1, "dp_III_2": dp2})


def predict_stage_IV(p_TIII: float, mp: ModelParams) -> StagePrediction:
    """Stage IV (the mutant trough; p recovers logistically).

    H_IV is the positive root of
        (1-f) H = (1/(1+alpha)) log(1 + (1+alpha) p (e^H - 1)),
    duration H_IV/eps, p_end = p e^{H_IV} / (1 + (1+alpha) p (e^{H_IV}-1)).
    Also returns the v* log-profile g(t) with g(T_III) ~ 0 and
    v*(t) = v*(T_III) exp[g(t)], evaluable for testing.
    """
    a, f, eps = mp.alpha, mp.f, mp.epsilon
    if p_TIII >= 1.0 - f:
        raise ParamError(f"stage IV degenerate: p(T_III) = {p_TIII} >= 1-f = {1-f}")
    if p_TIII <= 0:
        raise ParamError("p(T_III) must be positive")

    def g(H):
        return (1.0 - f) * H - math.log(1.0 + (1.0 + a) * p_TIII * (math.exp(H) - 1.0)) / (1.0 + a)

    H_IV = bisect_root(g, 1e-6, 1.0)
    eH = math.exp(H_IV)
    p_end = p_TIII * eH / (1.0 + (1.0 + a) * p_TIII * (eH - 1.0))

    def p_of(t: float) -> float:
        e = math.exp(eps * t)
        return p_TIII * e / (1.0 + (1.0 + a) * p_TIII * (e - 1.0))

    def vstar_profile(t: float) -> float:
        """g(t - T_III): log v*(t)/v*(T_III) through stage IV."""
        pt = p_of(t)
        return (
            -(1.0 - f) * t
            + math.log(1.0 + (1.0 + a) * p_TIII * (math.exp(eps * t) - 1.0)) / ((1.0 + a) * eps)
            + eps * ((1.0 - p_TIII) / (1.0 - pt)) * math.exp(p_TIII - pt)
        )

    return StagePrediction(Stage.IV, H_IV / eps, p_end, aux={"H_IV": H_IV},
                           vstar_profile=vstar_profile)
