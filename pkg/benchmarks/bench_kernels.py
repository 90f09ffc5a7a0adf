#!/usr/bin/env python3
"""Throughput comparison: compiled kernels vs the pure-Python fallback.

Run:  python benchmarks/bench_kernels.py [--steps N] [--events N]

Both implementations consume identical Philox draw blocks and produce
bitwise-identical results (asserted here); the table reports how much the
compiled extension buys on each hot loop.
"""

import argparse
import time

import numpy as np

from escapelab import RngStream
from escapelab._kernels import HAVE_COMPILED, fallback

if HAVE_COMPILED:
    from escapelab._kernels import _core
else:
    _core = None


def bench_sde(mod, n_steps):
    gen = RngStream(1).generator()
    rec = np.zeros((1, 6))
    state = (0.5, 1e-4, 0.5, 0.0)
    chunk = 1 << 16
    done = 0
    t0 = time.perf_counter()
    v, vs, p, t = state
    tau_v = tau_vs = 0.0
    sup_vs = vs
    while done < n_steps:
        normals = gen.standard_normal((min(chunk, n_steps - done), 2))
        out = mod.sde_em_segment(v, vs, p, t, 1e-3, normals,
                                 1.0, 0.8, 0.05, 1.0, 1.0, 1e6,
                                 1.0, 1e6, 0, 0.0, 0.0, 0, 0, 0, rec,
                                 tau_v, tau_vs, sup_vs, done)
        steps, v, vs, p, t, tau_v, tau_vs, sup_vs = out[0], out[1], out[2], out[3], out[4], out[5], out[6], out[7]
        done += steps
    return time.perf_counter() - t0, done, (v, vs, p)


def bench_bd(mod, n_events):
    gen = RngStream(2).generator()
    rec = np.zeros((1, 4))
    empty_l = np.empty(1, dtype=np.int64)
    empty_d = np.empty(1)
    Nv, Ns, Np, t = 5000, 500, 5000, 0.0
    chunk = 1 << 16
    done = 0
    t0 = time.perf_counter()
    while done < n_events:
        uniforms = gen.random(2 * min(chunk, n_events - done))
        out = mod.bd_gillespie_segment(Nv, Ns, Np, t, uniforms, 2,
                                       1.0, 0.8, 0.05, 1.0, 1.0, 1.0, 1e4,
                                       1e18, n_events, 0, 0, 0, 0, rec,
                                       0, empty_l, empty_l, empty_d, empty_d,
                                       empty_l, empty_l, 0, 0, 0, 0, done, Ns)
        done += out[0]
        Nv, Ns, Np, t = out[1], out[2], out[3], out[4]
        if out[6] in (4, 5):
            break
    return time.perf_counter() - t0, done, (Nv, Ns, Np)


def bench_feller(mod, n_steps):
    gen = RngStream(3).generator()
    w, s, integral = 1000.0, 0.0, 0.0  # large start: no absorption mid-bench
    chunk = 1 << 16
    done = 0
    t0 = time.perf_counter()
    while done < n_steps:
        normals = gen.standard_normal(min(chunk, n_steps - done))
        steps, w, s, integral, absorbed = mod.feller_em_segment(w, s, 1e-6, normals,
                                                                integral, 1e-300)
        done += steps
        if absorbed:
            break
    return time.perf_counter() - t0, done, w


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2_000_000)
    ap.add_argument("--events", type=int, default=2_000_000)
    args = ap.parse_args()

    if not HAVE_COMPILED:
        print("compiled kernels unavailable; nothing to compare")
        return

    rows = []
    for name, fn, n in (("sde_em", bench_sde, args.steps),
                        ("gillespie", bench_bd, args.events),
                        ("feller_em", bench_feller, args.steps)):
        tc, done_c, out_c = fn(_core, n)
        tp, done_p, out_p = fn(fallback, n)
        assert done_c == done_p and np.allclose(out_c, out_p, rtol=0, atol=0), name
        rows.append((name, done_c, done_c / tc / 1e6, done_p / tp / 1e6, tp / tc))

    print(f"{'kernel':<12}{'units':>12}{'compiled M/s':>14}{'python M/s':>12}{'speedup':>9}")
    for name, n, mc, mp_, sp in rows:
        print(f"{name:<12}{n:>12}{mc:>14.2f}{mp_:>12.3f}{sp:>8.0f}x")
    print("\n(outputs bitwise-identical across implementations)")


if __name__ == "__main__":
    main()
