"""Command-line interface.

Subcommands: ode, sde, bd, predict, campaign, coalescent, compare,
figures-data.  Flags mirror config-file keys and override them; the
default output directory comes from --outputs or $ESCAPELAB_OUTDIR.
Exit codes: 0 complete/PASS, 1 usage error, 2 comparison FAIL.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import csvio
from .asymptotics import phi_lim, psi_lim
from .bd import simulate_bd
from .config import load_config, model_params_from_config
from .harness import CompareReport, ExperimentSpec, run_campaign, write_predictor_report
from .ode import integrate_ode
from .outcomes import OutcomeLabel
from .params import ModelParams, ParamError, initial_state
from .rng import RngStream
from .sde import integrate_sde
from .stages import damping_check, detect_stages
from .coalescent import kingman_sample, predict_partition

__all__ = ["main"]


def _outdir(args) -> str:
    return args.outputs or os.environ.get("ESCAPELAB_OUTDIR", ".")


def _model_params(args) -> ModelParams:
    cfg = load_config(args.config) if args.config else {}
    overrides = {
        k: getattr(args, k, None)
        for k in ("alpha", "f", "k", "kstar", "V", "epsilon", "beta", "kappa", "q", "m")
    }
    if not cfg and all(v is None for v in overrides.values()):
        raise ParamError("provide --config or at least --alpha/--f and a scaling flag")
    if any(overrides.get(k) is not None for k in ("epsilon", "beta", "kappa")):
        for k in ("epsilon", "beta", "kappa"):
            cfg.pop(k, None)
    return model_params_from_config(cfg, **overrides)


def _seed(args, cfg_default: int = 0) -> int:
    if args.seed is not None:
        return args.seed
    if args.config:
        return int(load_config(args.config).get("seed", cfg_default))
    return cfg_default


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    for name in ("alpha", "f", "k", "kstar", "V", "epsilon", "beta", "kappa", "q", "m"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--outputs", help="output directory (default $ESCAPELAB_OUTDIR or .)")


def cmd_ode(args) -> int:
    mp = _model_params(args)
    t_end = args.t_end if args.t_end is not None else 1.0 / mp.epsilon**2
    traj = integrate_ode(mp, initial_state(mp), t_end, tol=args.tol)
    out = _outdir(args)
    csvio.write_trajectory(os.path.join(out, args.out), traj.times, traj.states)
    cycles = detect_stages(traj, mp)
    csvio.write_stage_times(os.path.join(out, args.stages_out), cycles)
    try:
        devs = damping_check(traj, mp)
        damp = " damping: " + " > ".join(f"{d:.4f}" for d in devs[:6])
    except Exception:
        damp = ""
    print(f"ode: {len(traj.times)} nodes to t = {traj.times[-1]:.6g}; "
          f"{len(cycles)} threshold cycles;{damp}")
    return 0


def cmd_sde(args) -> int:
    mp = _model_params(args)
    t_end = args.t_end if args.t_end is not None else 1.0 / mp.epsilon**2
    dt = args.dt if args.dt is not None else mp.epsilon / 50.0
    path = integrate_sde(mp, initial_state(mp), t_end, dt, RngStream(_seed(args), args.path_id),
                         p_noise=args.p_noise)
    csvio.write_trajectory(os.path.join(_outdir(args), args.out), path.times, path.states)
    print(f"sde: {len(path.times)} samples, stop = {path.stop_reason}, "
          f"sup v* = {path.sup_vstar:.4g}")
    return 0


def cmd_bd(args) -> int:
    mp = _model_params(args)
    t_end = args.t_end if args.t_end is not None else 1.0 / mp.epsilon**2
    u0 = initial_state(mp)
    counts0 = (int(round(mp.V * u0.v)), 1, int(round(mp.V * u0.p)))
    path = simulate_bd(mp, counts0, t_end, RngStream(_seed(args), args.path_id),
                       genealogy=args.genealogy_out is not None,
                       max_events=args.max_events)
    out = _outdir(args)
    csvio.write_bd_path(os.path.join(out, args.out), path.times, path.counts)
    if args.genealogy_out:
        csvio.write_genealogy(os.path.join(out, args.genealogy_out), path.wild_genealogy)
    print(f"bd: {path.events} events to t = {path.t_end:.6g}, stop = {path.stop_reason}")
    return 0


def cmd_predict(args) -> int:
    mp = _model_params(args)
    path = os.path.join(_outdir(args), args.out)
    write_predictor_report(path, mp, seed=_seed(args))
    header, rows = csvio.read_rows(path)
    print(", ".join(f"{h}={v}" for h, v in zip(header, rows[0]) if v != ""))
    return 0


def cmd_campaign(args) -> int:
    mp = _model_params(args)
    cfg = load_config(args.config) if args.config else {}
    spec = ExperimentSpec(
        mp=mp,
        fidelity=args.fidelity or cfg.get("fidelity", "sde"),
        n_paths=args.paths if args.paths is not None else int(cfg.get("n_paths", 100)),
        t_factor=args.t_factor if args.t_factor is not None else float(cfg.get("t_factor", 1.0)),
        dt=args.dt if args.dt is not None else cfg.get("dt"),
        sample_n=args.sample_n if args.sample_n is not None else int(cfg.get("sample_n", 0)),
        seed=_seed(args),
        outputs=_outdir(args),
        workers=args.workers,
        dry_run=args.dry_run,
        t_end=args.t_end,
    )
    summary = run_campaign(spec)
    print(f"campaign: {summary.n_effective} paths classified "
          f"({len(summary.failures)} failures); outputs in {spec.outputs}")
    for k, v in sorted(summary.counts.items()):
        if v:
            print(f"  {k}: {v} ({summary.freqs[k]:.4f})")
    return 0


def cmd_coalescent(args) -> int:
    mp = _model_params(args) if (args.config or args.alpha) else None
    gen = RngStream(_seed(args)).generator()
    rows = []
    if args.case == "kingman":
        t = math.inf if args.t == "inf" else float(args.t)
        for i in range(args.draws):
            rows.append((i, "kingman", kingman_sample(args.n, t, gen).partition))
    else:
        label = {
            "failed": OutcomeLabel.FAILED_MUTANT,
            "wild_lost": OutcomeLabel.WILD_LOST,
            "mutant_lost": OutcomeLabel.MUTANT_LOST_AFTER_RISE,
            "coexistence": OutcomeLabel.COEXISTENCE,
        }[args.case]
        if mp is None:
            raise ParamError("closed-form partition cases need model parameters (kappa mode)")
        for i in range(args.draws):
            rows.append((i, args.case, predict_partition(mp, label, args.n, gen)))
    csvio.write_partitions(os.path.join(_outdir(args), args.out), rows)
    print(f"coalescent: wrote {len(rows)} partitions to {args.out}")
    return 0


def cmd_compare(args) -> int:
    """Re-evaluate a written campaign summary against its thresholds."""
    header, rows = csvio.read_rows(os.path.join(args.outputs_dir, "summary.csv"))
    kv = {r[0]: r[1] for r in rows}
    lines = []
    ok = True
    for key, val in kv.items():
        if key.startswith("z_"):
            z = float(val)
            flag = "ok" if abs(z) <= args.z_max else "FAIL"
            ok &= abs(z) <= args.z_max
            lines.append(f"{key} = {z:+.3f} [{flag}]")
        if key.startswith("pvalue_"):
            p = float(val)
            flag = "ok" if p >= args.p_min else "FAIL"
            ok &= p >= args.p_min
            lines.append(f"{key} = {p:.4f} [{flag}]")
    if not lines:
        lines.append("nothing to compare (no z/pvalue entries in summary)")
    verdict = "PASS" if ok else "FAIL"
    for line in lines:
        print(line)
    print(f"verdict: {verdict}")
    return 0 if ok else 2


def cmd_figures_data(args) -> int:
    """Write the CSV inputs the figures component consumes."""
    out = _outdir(args)
    os.makedirs(out, exist_ok=True)
    # fig1: full damped solution at eps = 0.01
    mp1 = ModelParams(alpha=1.0, f=0.8, epsilon=0.01)
    traj = integrate_ode(mp1, initial_state(mp1), 1.0 / mp1.epsilon**2, tol=1e-10)
    keep = np.linspace(0, len(traj.times) - 1, min(len(traj.times), 6000)).astype(int)
    csvio.write_trajectory(os.path.join(out, "fig1_trajectory.csv"),
                           traj.times[keep], traj.states[keep])
    # fig2: first cycle at eps = 0.005 with stage-time markers; q = 1.5 so
    # the mutant trough actually reaches the detection level at this eps
    mp2 = ModelParams(alpha=1.0, f=0.8, epsilon=0.005, q=1.5)
    traj2 = integrate_ode(mp2, initial_state(mp2), 6000.0, tol=1e-10)
    cycles = detect_stages(traj2, mp2)
    first = cycles[:1]
    t_hi = first[0].T_IV * 1.05 if first else traj2.times[-1]
    mask = traj2.times <= t_hi
    csvio.write_trajectory(os.path.join(out, "fig2_trajectory.csv"),
                           traj2.times[mask], traj2.states[mask])
    csvio.write_stage_times(os.path.join(out, "fig2_stage_times.csv"), first)
    # fig3: phi_lim / psi_lim over f at alpha = 1
    alpha = args.alpha if args.alpha is not None else 1.0
    lo = alpha / (1 + alpha)
    fs = np.linspace(lo + 1e-4, 1 - 1e-4, 400)
    rows = [(float(f), phi_lim(alpha, float(f)), psi_lim(alpha, float(f))) for f in fs]
    csvio.write_rows(os.path.join(out, "fig3_limits.csv"), csvio.SCHEMAS["limit_curves"], rows)
    print(f"figures-data: wrote fig1/fig2/fig3 CSVs to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="escapelab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ode", help="deterministic trajectory + stage times")
    _add_model_flags(p)
    p.add_argument("--t-end", type=float)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="trajectory.csv")
    p.add_argument("--stages-out", default="stage_times.csv")
    p.set_defaults(func=cmd_ode)

    p = sub.add_parser("sde", help="one Euler-Maruyama path")
    _add_model_flags(p)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--path-id", type=int, default=0)
    p.add_argument("--p-noise", action="store_true")
    p.add_argument("--out", default="sde_path.csv")
    p.set_defaults(func=cmd_sde)

    p = sub.add_parser("bd", help="one exact birth-death path")
    _add_model_flags(p)
    p.add_argument("--t-end", type=float)
    p.add_argument("--path-id", type=int, default=0)
    p.add_argument("--max-events", type=int, default=1_000_000_000)
    p.add_argument("--out", default="bd_path.csv")
    p.add_argument("--genealogy-out")
    p.set_defaults(func=cmd_bd)

    p = sub.add_parser("predict", help="closed-form predictor report")
    _add_model_flags(p)
    p.add_argument("--out", default="predictor_report.csv")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("campaign", help="Monte Carlo outcome campaign")
    _add_model_flags(p)
    p.add_argument("--fidelity", choices=("ode", "sde", "bd"))
    p.add_argument("--paths", type=int)
    p.add_argument("--t-factor", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--sample-n", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dry-run", action="store_true")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("coalescent", help="sample lineage partitions")
    _add_model_flags(p)
    p.add_argument("--case", default="kingman",
                   choices=("kingman", "failed", "wild_lost", "mutant_lost", "coexistence"))
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--t", default="1.0", help="Kingman duration (or 'inf')")
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--out", default="partitions.csv")
    p.set_defaults(func=cmd_coalescent)

    p = sub.add_parser("compare", help="verdict on a written campaign summary")
    p.add_argument("outputs_dir")
    p.add_argument("--z-max", type=float, default=3.0)
    p.add_argument("--p-min", type=float, default=0.01)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("figures-data", help="write CSV inputs for the figures frontend")
    p.add_argument("--outputs")
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=cmd_figures_data)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except ParamError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
