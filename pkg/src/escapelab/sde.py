"""Euler-Maruyama integration of the diffusion-level model.

Fixed-step EM (bottleneck windows need unbiased noise accumulation), full
truncation of the square-root diffusion coefficients at zero, and hard
absorption of v / v* the first time a step lands at or below the
absorption floor.  The default floor is 0: absorbing at half an
individual (1/(2V)) systematically inflates early-stage extinction
relative to the exact birth-death process (see README), but remains
available as "half-individual".

The optional predator noise term sqrt(eps p (h + v + alpha p)/P) dB3 is
off by default, matching the model statement that drops it; p_noise=True
switches it on with a caller-supplied P scale (defaults to V).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import ModelParams, ParamError, SystemState
from .rng import RngStream

__all__ = ["SdePath", "integrate_sde"]

_CHUNK = 1 << 16


@dataclass
class SdePath:
    """Recorded samples of one EM path plus its absorption bookkeeping.

    tau_v / tau_vstar are the running trapezoid integrals of 1/(V x)
    along the path (the coalescent clock of each prey type), sampled on
    the same grid as states.
    """

    times: np.ndarray
    states: np.ndarray  # (n, 3)
    tau_v: np.ndarray
    tau_vstar: np.ndarray
    dt: float
    sup_vstar: float
    absorbed_v: float | None
    absorbed_vstar: float | None
    p_noise_enabled: bool
    mp: ModelParams
    absorb_floor: float
    stop_reason: str  # "t_end" | "v_absorbed" | "vstar_absorbed" | "vstar_threshold"
    probes: dict[float, np.ndarray]

    def final_state(self) -> SystemState:
        v, vs, p = self.states[-1]
        return SystemState(float(v), float(vs), float(p), t=float(self.times[-1]))

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def min_alive(self, which: str) -> float:
        """Smallest recorded positive value of the tracked coordinate."""
        col = {"wild": 0, "mutant": 1}[which]
        x = self.states[:, col]
        alive = x > 0
        return float(x[alive].min()) if alive.any() else 0.0


def integrate_sde(mp: ModelParams, u0: SystemState, t_end: float, dt: float,
                  rng: RngStream, p_noise: bool = False,
                  absorb_floor: float | str = 0.0, p_scale: float | None = None,
                  record_every: int | None = None,
                  probe_times=None,
                  stop_on_v_absorbed: bool = False,
                  stop_on_vstar_absorbed: bool = False,
                  vstar_stop: float = 0.0) -> SdePath:
    """One EM path from u0 to t_end (or an earlier requested stop).

    Args:
        dt: fixed step; must satisfy dt <= eps/10 so the slow predator
            dynamics stay resolved.
        absorb_floor: 0.0, a level, or "half-individual" for 1/(2V).
        record_every: keep every k-th step (default targets ~2e5 rows);
            0 keeps only endpoints and probes.
        probe_times: times at which the state is captured exactly on the
            step grid (for bottleneck measurements).
        vstar_stop: stop once v* reaches this density (0 = never).
    """
    if dt <= 0:
        raise ParamError("dt must be positive")
    if dt > mp.epsilon / 10.0 * (1 + 1e-12):
        raise ParamError(f"dt = {dt} too coarse; need dt <= eps/10 = {mp.epsilon / 10:.3g}")
    if t_end <= u0.t:
        raise ParamError("t_end must exceed u0.t")
    if absorb_floor == "half-individual":
        absorb_floor = 0.5 / mp.V
    elif not isinstance(absorb_floor, (int, float)):
        raise ParamError(f"bad absorb_floor {absorb_floor!r}")
    p_scale = mp.V if p_scale is None else p_scale

    n_steps = int(math.ceil((t_end - u0.t) / dt - 1e-9))
    if record_every is None:
        record_every = max(1, n_steps // 200_000)
    probe_steps = {}
    if probe_times:
        for tp in probe_times:
            k = int(round((tp - u0.t) / dt))
            if not (0 <= k <= n_steps):
                raise ParamError(f"probe time {tp} outside [u0.t, t_end]")
            probe_steps[k] = tp

    gen = rng.generator()
    ndim = 3 if p_noise else 2
    v, vs, p = u0.as_tuple()
    t = float(u0.t)
    tau_v = tau_vs = 0.0
    sup_vs = vs
    abs_v_step = -1 if v > 0 else 0
    abs_vs_step = -1 if vs > 0 else 0
    if v <= 0:
        v = 0.0
    if vs <= 0:
        vs = 0.0

    rows = [(t, v, vs, p, 0.0, 0.0)]
    probes: dict[float, np.ndarray] = {}
    if 0 in probe_steps:
        probes[probe_steps[0]] = np.array([v, vs, p])
    rec_cap = (_CHUNK // record_every + 2) if record_every > 0 else 1
    rec = np.empty((rec_cap, 6))
    step = 0
    stop_code = 0
    boundaries = sorted(set(probe_steps) | {n_steps})
    for b in boundaries:
        if b <= step:
            continue
        while step < b:
            take = min(_CHUNK, b - step)
            normals = gen.standard_normal((take, ndim))
            (done, v, vs, p, t, tau_v, tau_vs, sup_vs, av, avs, nrec,
             stop_code) = _kernels.sde_em_segment(
                v, vs, p, t, dt, normals,
                mp.alpha, mp.f, mp.epsilon, mp.k, mp.kstar, mp.V,
                mp.hbar, p_scale, int(p_noise),
                float(absorb_floor), vstar_stop,
                int(stop_on_v_absorbed), int(stop_on_vstar_absorbed),
                record_every, rec, tau_v, tau_vs, sup_vs, step,
            )
            step += done
            if nrec:
                rows.extend(map(tuple, rec[:nrec]))
            if av >= 0 and abs_v_step < 0:
                abs_v_step = av
            if avs >= 0 and abs_vs_step < 0:
                abs_vs_step = avs
            if stop_code != 0:
                break
        if stop_code != 0:
            break
        if step in probe_steps:
            probes[probe_steps[step]] = np.array([v, vs, p])

    if not rows or rows[-1][0] != t:
        rows.append((t, v, vs, p, tau_v, tau_vs))
    arr = np.array(rows)
    reason = {0: "t_end", 1: "v_absorbed", 2: "vstar_absorbed", 3: "vstar_threshold"}[stop_code]
    return SdePath(
        absorb_floor=float(absorb_floor),
        times=arr[:, 0],
        states=arr[:, 1:4],
        tau_v=arr[:, 4],
        tau_vstar=arr[:, 5],
        dt=dt,
        sup_vstar=sup_vs,
        absorbed_v=(u0.t + abs_v_step * dt) if abs_v_step >= 0 else None,
        absorbed_vstar=(u0.t + abs_vs_step * dt) if abs_vs_step >= 0 else None,
        p_noise_enabled=p_noise,
        mp=mp,
        stop_reason=reason,
        probes=probes,
    )
