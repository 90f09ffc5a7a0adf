"""Monte Carlo campaign orchestration and prediction-vs-simulation statistics.

A campaign fans n_paths independent paths over streams (seed, 0..n-1),
classifies each terminal outcome, computes the closed-form predictions
once, and writes raw plus summary CSVs.  Results are deterministic given
the spec: aggregation is keyed by stream id, so the worker count never
changes a byte of output.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import csvio
from .asymptotics import (OutcomeProbabilities, limit_functions, outcome_probs,
                          p_failed, solve_fhat)
from .bd import simulate_bd
from .coalescent import LineagePartition, birth_weighted_factor, track_lineages
from .outcomes import Outcome, OutcomeLabel, classify_outcome
from .params import ModelParams, ParamError, initial_state
from .rng import RngStream
from .sde import integrate_sde
from .stats import freq_ci, z_score

__all__ = ["ExperimentSpec", "CampaignSummary", "run_campaign", "compare", "CompareReport"]

# outcome label -> limit mass name (u_M is the wild-lost steady state)
MASS_OF_LABEL = {
    OutcomeLabel.FAILED_MUTANT: "uW_failed",
    OutcomeLabel.MUTANT_LOST_AFTER_RISE: "uW_lost",
    OutcomeLabel.WILD_LOST: "uM",
    OutcomeLabel.COEXISTENCE: "uC",
}


@dataclass(frozen=True)
class ExperimentSpec:
    mp: ModelParams
    fidelity: str = "sde"  # ode | sde | bd
    n_paths: int = 100
    t_factor: float = 1.0  # t_f = t_factor / eps^2
    dt: float | None = None  # sde step; default eps/50
    sample_n: int = 0  # lineage sample size per surviving path (0 = off)
    seed: int = 0
    outputs: str | None = None
    workers: int = 1
    dry_run: bool = False
    max_events: int = 1_000_000_000
    genealogy: bool = False  # bd fidelity: record ancestry
    pair_rate_factor: float | str = 1.0  # or "birth-weighted"
    t_end: float | None = None  # override t_f

    def __post_init__(self):
        if self.fidelity not in ("ode", "sde", "bd"):
            raise ParamError(f"fidelity must be ode/sde/bd, got {self.fidelity}")
        if self.n_paths < 0 or (self.n_paths < 1 and not self.dry_run):
            raise ParamError("n_paths must be >= 1 (or use dry_run)")
        if self.t_factor <= 0:
            raise ParamError("t_factor must be positive")

    @property
    def horizon(self) -> float:
        return self.t_end if self.t_end is not None else self.t_factor / self.mp.epsilon**2

    def resolved_dt(self) -> float:
        return self.dt if self.dt is not None else self.mp.epsilon / 50.0

    def resolved_factor(self) -> float:
        if self.pair_rate_factor == "birth-weighted":
            return birth_weighted_factor(self.mp, "wild")
        return float(self.pair_rate_factor)


@dataclass
class CampaignSummary:
    spec: ExperimentSpec
    counts: dict[str, int]
    n_effective: int
    freqs: dict[str, float]
    cis: dict[str, tuple[float, float]]
    predicted: OutcomeProbabilities | None
    prediction_note: str
    z: dict[str, float]
    outcomes: list[Outcome]
    partitions: list[tuple[int, str, LineagePartition]] = field(default_factory=list)
    pvalues: dict[str, float] = field(default_factory=dict)
    failures: list[tuple[int, str]] = field(default_factory=list)
    stage_cycles: list = field(default_factory=list)  # ode fidelity only


def _one_path(spec: ExperimentSpec, i: int):
    """Simulate, classify and (optionally) sample lineages for path i."""
    mp = spec.mp
    stream = RngStream(spec.seed, i)
    t_f = spec.horizon
    u0 = initial_state(mp)
    try:
        if spec.fidelity == "sde":
            path = integrate_sde(
                mp, u0, t_f, spec.resolved_dt(), stream,
                record_every=0 if spec.sample_n == 0 else None,
                stop_on_v_absorbed=True, stop_on_vstar_absorbed=True,
            )
        elif spec.fidelity == "bd":
            counts0 = (int(round(mp.V * u0.v)), 1, int(round(mp.V * u0.p)))
            path = simulate_bd(
                mp, counts0, t_f, stream, genealogy=spec.genealogy,
                max_events=spec.max_events,
                stop_on_v_absorbed=True, stop_on_vstar_absorbed=True,
            )
        else:
            from .ode import integrate_ode

            traj = integrate_ode(mp, u0, t_f, tol=1e-10)
            final = traj.final_state()

            class _OdeView:  # duck-typed for classify_outcome
                states = traj.states
                times = traj.times
                sup_vstar = float(traj.states[:, 1].max())
                absorbed_v = None
                absorbed_vstar = None
                t_end = float(traj.times[-1])
                stop_reason = "t_end"

            out = classify_outcome(_OdeView(), mp, t_f)
            return out, None
        out = classify_outcome(path, mp, t_f)
        part = None
        if spec.sample_n > 0 and spec.fidelity == "sde" and path.absorbed_v is None:
            part = track_lineages(path, spec.sample_n, "wild", stream.child(10**9 + i),
                                  pair_rate_factor=spec.resolved_factor())
        return out, part
    except Exception as exc:  # recorded, never aborts the campaign
        return ("error", f"{type(exc).__name__}: {exc}"), None


def _predictions(mp: ModelParams, rng_seed: int):
    if mp.scaling_mode == "beta":
        return outcome_probs(mp), "beta-regime outcome table"
    if mp.scaling_mode == "kappa":
        try:
            return outcome_probs(mp, RngStream(rng_seed, 2**62)), "critical-coupling outcome table"
        except ParamError as exc:
            return None, f"no closed-form masses: {exc}"
    return None, "fixed-epsilon mode: no closed-form outcome table"


def run_campaign(spec: ExperimentSpec) -> CampaignSummary:
    mp = spec.mp
    predicted, note = _predictions(mp, spec.seed)

    outcomes: list[Outcome] = []
    partitions: list[tuple[int, str, LineagePartition]] = []
    failures: list[tuple[int, str]] = []
    if not spec.dry_run and spec.n_paths > 0:
        jobs = list(range(spec.n_paths))
        if spec.workers > 1:
            with ProcessPoolExecutor(max_workers=spec.workers) as ex:
                results = list(ex.map(_one_path, [spec] * len(jobs), jobs,
                                      chunksize=max(1, len(jobs) // (4 * spec.workers))))
        else:
            results = [_one_path(spec, i) for i in jobs]
        for i, (out, part) in enumerate(results):
            if isinstance(out, tuple) and out[0] == "error":
                failures.append((i, out[1]))
                continue
            outcomes.append(out)
            if part is not None:
                partitions.append((i, out.label.value, part))

    counts = {label.value: 0 for label in OutcomeLabel}
    for out in outcomes:
        counts[out.label.value] += 1
    n_eff = len(outcomes)
    freqs = {k: (c / n_eff if n_eff else math.nan) for k, c in counts.items()}
    cis = {k: freq_ci(c, n_eff) for k, c in counts.items()}
    z = {}
    if predicted is not None and n_eff:
        masses = predicted.masses()
        for label, mass_name in MASS_OF_LABEL.items():
            z[mass_name] = z_score(counts[label.value], n_eff, masses[mass_name])
    stage_cycles = []
    if spec.fidelity == "ode" and not spec.dry_run:
        from .ode import integrate_ode
        from .stages import detect_stages

        traj = integrate_ode(mp, initial_state(mp), spec.horizon, tol=1e-10)
        stage_cycles = detect_stages(traj, mp)
    summary = CampaignSummary(
        spec=spec, counts=counts, n_effective=n_eff, freqs=freqs, cis=cis,
        predicted=predicted, prediction_note=note, z=z, outcomes=outcomes,
        partitions=partitions, failures=failures, stage_cycles=stage_cycles,
    )
    if spec.outputs:
        _write_campaign(summary)
    return summary


def _write_campaign(s: CampaignSummary) -> None:
    out = s.spec.outputs
    os.makedirs(out, exist_ok=True)
    rows = []
    for i, o in enumerate(s.outcomes):
        st = o.final_state
        rows.append((i, o.label.value, o.t_resolved, st.v, st.vstar, st.p))
    csvio.write_rows(os.path.join(out, "outcomes.csv"), csvio.SCHEMAS["outcomes"], rows)
    write_predictor_report(os.path.join(out, "predictor_report.csv"), s.spec.mp,
                           s.predicted, seed=s.spec.seed)
    sm = []
    sm.append(("fidelity", s.spec.fidelity))
    sm.append(("n_paths", s.spec.n_paths))
    sm.append(("n_effective", s.n_effective))
    sm.append(("t_f", s.spec.horizon))
    sm.append(("prediction_note", s.prediction_note))
    for k in sorted(s.counts):
        sm.append((f"count_{k}", s.counts[k]))
        sm.append((f"freq_{k}", s.freqs[k]))
        lo, hi = s.cis[k]
        sm.append((f"ci95_lo_{k}", lo))
        sm.append((f"ci95_hi_{k}", hi))
    for k in sorted(s.z):
        sm.append((f"z_{k}", s.z[k]))
    for k in sorted(s.pvalues):
        sm.append((f"pvalue_{k}", s.pvalues[k]))
    for i, msg in s.failures:
        sm.append((f"failure_{i}", msg))
    csvio.write_rows(os.path.join(out, "summary.csv"), csvio.SCHEMAS["summary"], sm)
    if s.partitions:
        csvio.write_partitions(os.path.join(out, "partitions.csv"), s.partitions)
    if s.stage_cycles:
        csvio.write_stage_times(os.path.join(out, "stage_times.csv"), s.stage_cycles)


def write_predictor_report(path: str, mp: ModelParams,
                           predicted: OutcomeProbabilities | None = None,
                           seed: int = 0) -> None:
    lf = limit_functions(mp.alpha, mp.f)
    if predicted is None:
        predicted, _ = _predictions(mp, seed)
    if predicted is not None:
        row = [mp.alpha, mp.f, predicted.regime.value, lf.phi_lim, lf.psi_lim, lf.H,
               predicted.p_failed,
               predicted.rho_W if predicted.rho_W is not None else "",
               predicted.rho_M if predicted.rho_M is not None else "",
               predicted.rho_M_stderr if predicted.rho_M_stderr is not None else "",
               predicted.p_uW_failed, predicted.p_uW_lost, predicted.p_uM, predicted.p_uC]
    else:
        row = [mp.alpha, mp.f, "none", lf.phi_lim, lf.psi_lim, lf.H,
               p_failed(mp.alpha, mp.f, mp.kstar), "", "", "", "", "", "", ""]
    csvio.write_rows(path, csvio.SCHEMAS["predictor_report"], [row])


@dataclass
class CompareReport:
    verdict: str  # PASS | FAIL
    lines: list[str]
    worst_z: float
    worst_p: float


def compare(summary: CampaignSummary, z_max: float = 3.0, p_min: float = 0.01
            ) -> CompareReport:
    """Per-quantity z-scores and distribution-test p-values -> verdict.

    PASS when every |z| <= z_max and every p >= p_min; no predictions
    means nothing to compare (PASS with a note).
    """
    lines = []
    worst_z = 0.0
    worst_p = 1.0
    ok = True
    if summary.predicted is None:
        lines.append(f"no closed-form prediction: {summary.prediction_note}")
    else:
        masses = summary.predicted.masses()
        for mass_name, zval in summary.z.items():
            flag = "ok" if abs(zval) <= z_max else "FAIL"
            if abs(zval) > z_max:
                ok = False
            worst_z = max(worst_z, abs(zval))
            lines.append(
                f"mass {mass_name}: predicted {masses[mass_name]:.4f} "
                f"observed {summary.freqs[_label_of(mass_name)]:.4f} z = {zval:+.2f} [{flag}]"
            )
    for name, p in summary.pvalues.items():
        flag = "ok" if p >= p_min else "FAIL"
        if p < p_min:
            ok = False
        worst_p = min(worst_p, p)
        lines.append(f"distribution test {name}: p = {p:.4f} [{flag}]")
    return CompareReport("PASS" if ok else "FAIL", lines, worst_z, worst_p)


def _label_of(mass_name: str) -> str:
    for label, mn in MASS_OF_LABEL.items():
        if mn == mass_name:
            return label.value
    raise KeyError(mass_name)
