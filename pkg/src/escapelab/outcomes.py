"""Terminal outcome classification for simulated paths.

Label semantics:
    FailedMutant        sup_{t <= t_f} v* < eps (the mutant never reached
                        the eps density; the defining criterion)
    WildLost            v absorbed
    MutantLostAfterRise v* absorbed after having exceeded eps
    Coexistence         state within max-norm coexist_tol of u_C at t_f
    Unresolved          none of the above (including budget-truncated paths)
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .bd import BdPath
from .params import ModelParams, SystemState, equilibria
from .sde import SdePath

__all__ = ["OutcomeLabel", "Outcome", "classify_outcome"]


class OutcomeLabel(Enum):
    FAILED_MUTANT = "FailedMutant"
    MUTANT_LOST_AFTER_RISE = "MutantLostAfterRise"
    WILD_LOST = "WildLost"
    COEXISTENCE = "Coexistence"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class Outcome:
    label: OutcomeLabel
    t_resolved: float
    final_state: SystemState


def classify_outcome(path: SdePath | BdPath, mp: ModelParams, t_f: float) -> Outcome:
    """Classify one path over [0, t_f] (or ended earlier by absorption)."""
    if isinstance(path, BdPath):
        sup_vs = path.sup_Nvstar / path.V
        final = path.counts[-1] / path.V
        t_last = path.t_end
        truncated = path.stop_reason == "budget"
    else:
        sup_vs = path.sup_vstar
        final = path.states[-1]
        t_last = path.t_end
        truncated = False
    state = SystemState(float(max(final[0], 0.0)), float(max(final[1], 0.0)),
                        float(max(final[2], 0.0)), t=t_last)
    eps = mp.epsilon

    if truncated:
        return Outcome(OutcomeLabel.UNRESOLVED, t_last, state)
    if sup_vs < eps and (path.absorbed_vstar is not None or t_last >= t_f):
        t_res = path.absorbed_vstar if path.absorbed_vstar is not None else t_f
        return Outcome(OutcomeLabel.FAILED_MUTANT, t_res, state)
    if path.absorbed_v is not None:
        return Outcome(OutcomeLabel.WILD_LOST, path.absorbed_v, state)
    if path.absorbed_vstar is not None:
        return Outcome(OutcomeLabel.MUTANT_LOST_AFTER_RISE, path.absorbed_vstar, state)
    if t_last >= t_f:
        u_C = equilibria(mp).u_C
        dist = max(abs(state.v - u_C.v), abs(state.vstar - u_C.vstar), abs(state.p - u_C.p))
        if dist <= mp.coexist_tol:
            return Outcome(OutcomeLabel.COEXISTENCE, t_f, state)
    return Outcome(OutcomeLabel.UNRESOLVED, t_last, state)
