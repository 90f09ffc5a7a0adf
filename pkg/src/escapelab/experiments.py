"""Prediction-vs-simulation experiments beyond plain outcome counting.

measure_stage_II_bottleneck: under the critical kappa-coupling, the wild
density through its stage-II trough behaves as v(t) = w[tau(t)] vbar(t)
with w a Feller diffusion and tau a Gaussian clock of total mass
sqrt(2 pi) (k+1) Xi_II.  The measurement window is +-n_sigma standard
deviations of that clock (sigma = 1/sqrt(eps alpha (1-f)^2)) centered on
the deterministic minimum; the exponent is symmetric there, so
vbar(t1) = vbar(t0) and the per-path ratio v(t1)/vbar(t0) is a direct
draw of w at the clock.

compare_lineage_machinery: matched-parameter comparison of the two
lineage routes -- exact birth-death genealogies vs rate-based tracking
along SDE paths -- through one wild bottleneck cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import t_wild, upsilon
from .bd import simulate_bd
from .coalescent import (LineagePartition, bd_genealogy, birth_weighted_factor,
                         track_lineages)
from .feller import sample_transition_values
from .ode import integrate_ode
from .params import ModelParams, ParamError, initial_state
from .rng import RngStream
from .sde import integrate_sde
from .stats import partition_two_sample_test, two_sample_ks

__all__ = [
    "BottleneckMeasurement",
    "CoalescentComparison",
    "measure_stage_II_bottleneck",
    "stage_II_window",
    "compare_lineage_machinery",
]


@dataclass
class BottleneckMeasurement:
    ratios: np.ndarray
    n_paths: int
    n_nonfailed: int
    n_surviving: int
    t0: float
    t1: float
    t_min: float
    v_t0: float
    clock: float
    xi_limit: float
    survival_freq: float
    survival_pred: float
    ks_stat: float
    ks_pvalue: float


def stage_II_window(mp: ModelParams, n_sigma: float = 4.0,
                    horizon: float | None = None):
    """Deterministic trough location and a level-set measurement window.

    Returns (t0, t1, t_min, vbar(t0), trajectory) with t0 < t_min < t1
    the crossings of the level exp(n_sigma^2/2) * vbar(t_min) around the
    deepest trough, so vbar(t0) = vbar(t1) by construction.  Where the
    trough is quadratic in the clock variable this is exactly the
    +-n_sigma window (sigma = 1/sqrt(eps alpha (1-f)^2)) and captures all
    but ~2(1-Phi(n_sigma)) of the Feller clock's Gaussian mass.
    """
    eps = mp.epsilon
    if horizon is None:
        horizon = 40.0 / eps
    traj = integrate_ode(mp, initial_state(mp), horizon, tol=1e-11)
    v = traj.states[:, 0]
    i_min = 1 + int(np.argmin(v[1:-1]))
    lo = traj.times[max(i_min - 1, 0)]
    hi = traj.times[min(i_min + 1, len(v) - 1)]
    ts = np.linspace(lo, hi, 2001)
    vs = traj.state_at(ts)[0]
    t_min = float(ts[np.argmin(vs)])
    v_min = float(np.min(vs))
    level = math.exp(0.5 * n_sigma**2) * v_min
    if level >= 0.25 * float(v[0]):
        raise ParamError(
            f"trough too shallow for a +-{n_sigma} sigma window: "
            f"v_min = {v_min:.3g}, level = {level:.3g}"
        )

    def v_of(t):
        return float(traj.state_at(float(t))[0])

    from scipy.optimize import brentq

    # bracket the level crossings outward from the trough
    sigma = 1.0 / math.sqrt(eps * mp.alpha * (1.0 - mp.f) ** 2)
    step = max(sigma / 4.0, 1.0)
    t_lo = t_min
    while v_of(t_lo) < level:
        t_lo -= step
        if t_lo <= traj.times[0]:
            raise ParamError("entry-side level crossing not found")
    t0 = brentq(lambda t: v_of(t) - level, t_lo, t_lo + step)
    t_hi = t_min
    while v_of(t_hi) < level:
        t_hi += step
        if t_hi >= traj.times[-1]:
            raise ParamError("exit-side level crossing not found")
    t1 = brentq(lambda t: v_of(t) - level, t_hi - step, t_hi)
    return float(t0), float(t1), t_min, level, traj


def measure_stage_II_bottleneck(mp: ModelParams, n_paths: int, seed: int,
                                dt: float | None = None, n_sigma: float = 4.0,
                                ref_draws: int = 200_000) -> BottleneckMeasurement:
    """Measured v(t1)/vbar(t0) across surviving SDE paths vs the Feller law.

    Requires kappa-scaling mode (the clock's limit value is
    sqrt(2 pi) (k+1) Xi_II with Xi_II from the scaling limit).  Paths
    whose mutant fails or whose wild type absorbs before t1 drop out of
    the ratio sample (the law is conditioned on survival); the survival
    frequency itself is reported against exp(-2/clock).
    """
    if mp.kappa is None:
        raise ParamError("bottleneck measurement requires kappa-scaling mode")
    dt = mp.epsilon / 20.0 if dt is None else dt
    t0, t1, t_min, v_t0, _ = stage_II_window(mp, n_sigma)
    xi = upsilon(mp)
    clock = t_wild(mp)  # sqrt(2 pi) (k+1) Xi_II at the scaling limit
    u0 = initial_state(mp)
    ratios = []
    n_nonfailed = 0
    n_surviving = 0
    for i in range(n_paths):
        path = integrate_sde(mp, u0, t1, dt, RngStream(seed, i),
                             record_every=0, probe_times=[t0, t1],
                             stop_on_v_absorbed=True,
                             stop_on_vstar_absorbed=True)
        if path.sup_vstar < mp.epsilon:
            continue  # failed mutant; bottleneck never happens
        n_nonfailed += 1
        if path.absorbed_v is not None or t1 not in path.probes:
            continue
        v_t1 = float(path.probes[t1][0])
        if v_t1 <= 0.0:
            continue
        n_surviving += 1
        ratios.append(v_t1 / v_t0)
    ratios = np.array(ratios)
    gen = RngStream(seed, 2**62).generator()
    ref = sample_transition_values(1.0, clock, gen, ref_draws)
    surv_pred = 1.0 - math.exp(-2.0 / clock)
    ks, p = (math.nan, math.nan)
    if len(ratios) >= 10:
        ks, p = two_sample_ks(ratios, ref[ref > 0.0])
    return BottleneckMeasurement(
        ratios=ratios, n_paths=n_paths, n_nonfailed=n_nonfailed,
        n_surviving=n_surviving, t0=t0, t1=t1, t_min=t_min, v_t0=v_t0,
        clock=clock, xi_limit=xi,
        survival_freq=(n_surviving / n_nonfailed if n_nonfailed else math.nan),
        survival_pred=surv_pred, ks_stat=ks, ks_pvalue=p,
    )


@dataclass
class CoalescentComparison:
    bd_partitions: list[LineagePartition]
    sde_partitions: list[LineagePartition]
    chi2: float
    pvalue: float
    pair_rate_factor: float
    t_sample: float


def compare_lineage_machinery(mp: ModelParams, n: int, t_sample: float,
                              n_paths: int, seed: int, dt: float | None = None,
                              pair_rate_factor: float | str = "birth-weighted",
                              ) -> CoalescentComparison:
    """Partition distributions: exact BD genealogy vs rate-based SDE tracking.

    Both sides run matched parameters through the first wild bottleneck
    and sample n wild lineages at t_sample, conditioned on wild survival.
    """
    factor = (birth_weighted_factor(mp, "wild")
              if pair_rate_factor == "birth-weighted" else float(pair_rate_factor))
    dt = mp.epsilon / 20.0 if dt is None else dt
    u0 = initial_state(mp)
    counts0 = (int(round(mp.V * u0.v)), 1, int(round(mp.V * u0.p)))
    bd_parts: list[LineagePartition] = []
    sde_parts: list[LineagePartition] = []
    for i in range(n_paths):
        stream = RngStream(seed, i)
        bd_path = simulate_bd(mp, counts0, t_sample, stream, genealogy=True,
                              stop_on_v_absorbed=True, stop_on_vstar_absorbed=True)
        if (bd_path.stop_reason == "t_end" and bd_path.sup_Nvstar >= mp.epsilon * mp.V
                and len(bd_path.wild_genealogy.alive) >= n):
            bd_parts.append(bd_genealogy(bd_path, n, "wild", stream.child(10**9 + i)))
    for i in range(n_paths):
        stream = RngStream(seed + 1, i)
        path = integrate_sde(mp, u0, t_sample, dt, stream,
                             stop_on_v_absorbed=True, stop_on_vstar_absorbed=True)
        if path.stop_reason != "t_end" or path.sup_vstar < mp.epsilon:
            continue
        try:
            sde_parts.append(track_lineages(path, n, "wild", stream.child(10**9 + i),
                                            pair_rate_factor=factor))
        except Exception:
            continue
    chi2, p = partition_two_sample_test(bd_parts, sde_parts)
    return CoalescentComparison(bd_parts, sde_parts, chi2, p, factor, t_sample)
