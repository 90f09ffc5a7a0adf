"""Exact birth-death simulation (Gillespie) of the cell-count model.

Nondimensional per-cell rates, derived by applying the rescaling to the
dimensional table with the predator channel carrying the time-scale
factor eps (the derivation is spelled out in the README and validated by
the mean-field test against the ODE rather than asserted):

    wild     birth (k+1)/2          death (k-1)/2 + (v+v*) + p
    mutant   birth (k*+f)/2         death (k*-f)/2 + (v+v*)
    predator birth eps (h/2 + v)    death eps (h/2 + alpha p)

with v = N_v/V etc.  The Kurtz limit of this table is exactly the model
SDE, including the dropped predator noise term with P = V.  Requires
k >= 1 and k* >= f so death rates stay nonnegative.

With genealogy=True every wild/mutant birth records (child, parent) and
deaths remove uniformly chosen individuals, giving the exact ancestry
the coalescent module samples from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .params import ModelParams, ParamError
from .rng import RngStream

__all__ = ["BdPath", "Genealogy", "simulate_bd"]

_CHUNK_EVENTS = 1 << 16


@dataclass
class Genealogy:
    """Parent pointers and terminal survivors for one tracked cell type.

    Individuals are dense integer ids; ids < n_founders existed at t = 0
    and are their own ancestors.
    """

    parent: np.ndarray  # parent[id] = parent id, -1 for founders
    birth_time: np.ndarray  # birth_time[id]; 0.0 for founders
    alive: np.ndarray   # ids alive at the end of the path
    n_founders: int

    def ancestor_at_zero(self, ind: int) -> int:
        while ind >= self.n_founders:
            ind = int(self.parent[ind])
        return ind


@dataclass
class BdPath:
    times: np.ndarray
    counts: np.ndarray  # (n, 3) int64 columns N_v, N_vstar, N_p
    V: float
    mp: ModelParams
    sup_Nvstar: int
    absorbed_v: float | None
    absorbed_vstar: float | None
    stop_reason: str  # "t_end" | "v_absorbed" | "vstar_absorbed" | "vstar_threshold" | "budget"
    events: int
    wild_genealogy: Genealogy | None = None
    mutant_genealogy: Genealogy | None = None

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def final_counts(self) -> tuple[int, int, int]:
        return tuple(int(x) for x in self.counts[-1])

    def density_path(self) -> tuple[np.ndarray, np.ndarray]:
        """(times, states) with counts scaled by V, for shared tooling."""
        return self.times, self.counts / self.V


def simulate_bd(mp: ModelParams, counts0: tuple[int, int, int], t_end: float,
                rng: RngStream, genealogy: bool = False,
                max_events: int = 1_000_000_000,
                record_every: int | None = None,
                vstar_stop_count: int = 0,
                stop_on_v_absorbed: bool = False,
                stop_on_vstar_absorbed: bool = False) -> BdPath:
    """One exact path from integer counts0 up to t_end or an earlier stop.

    The event budget converts runaway parameter sets into a flagged
    partial path ("budget") instead of a hung process.
    """
    if mp.k < 1.0 or mp.kstar < mp.f:
        raise ParamError("birth-death rates need k >= 1 and kstar >= f "
                         "(nonnegative baseline death rates)")
    Nv, Ns, Np = (int(c) for c in counts0)
    if min(Nv, Ns, Np) < 0:
        raise ParamError("counts must be nonnegative")
    if not math.isfinite(mp.V) or mp.V <= 0:
        raise ParamError("BD simulation needs a finite positive V")

    if record_every is None:
        record_every = max(1, max_events // 1_000_000 if max_events < 10_000_000 else 10_000)
    draws = 3 if genealogy else 2
    gen = rng.generator()

    if genealogy:
        cap_alive = int(4 * mp.V + 1024)
        w_parent = np.full(max(2 * Nv + 1024, 4096), -1, dtype=np.int64)
        m_parent = np.full(max(2 * Ns + 1024, 4096), -1, dtype=np.int64)
        w_btime = np.zeros_like(w_parent, dtype=np.float64)
        m_btime = np.zeros_like(m_parent, dtype=np.float64)
        w_alive = np.empty(cap_alive, dtype=np.int64)
        m_alive = np.empty(cap_alive, dtype=np.int64)
        w_alive[:Nv] = np.arange(Nv)
        m_alive[:Ns] = np.arange(Ns)
        n_w, n_m = Nv, Ns
        next_w, next_m = Nv, Ns
        founders_w, founders_m = Nv, Ns
    else:
        w_parent = m_parent = np.empty(1, dtype=np.int64)
        w_btime = m_btime = np.empty(1, dtype=np.float64)
        w_alive = m_alive = np.empty(1, dtype=np.int64)
        n_w = n_m = next_w = next_m = 0
        founders_w = founders_m = 0

    t = 0.0
    events = 0
    sup_Ns = Ns
    abs_v_t = 0.0 if Nv == 0 else None
    abs_vs_t = 0.0 if Ns == 0 else None
    rows = [(t, Nv, Ns, Np)]
    rec_cap = (_CHUNK_EVENTS // record_every + 2) if record_every > 0 else 1
    rec = np.empty((rec_cap, 4))
    stop_code = 0
    while True:
        uniforms = gen.random(_CHUNK_EVENTS * draws)
        (done, Nv, Ns, Np, t, nrec, stop_code, n_w, n_m, next_w, next_m,
         sup_Ns) = _kernels.bd_gillespie_segment(
            Nv, Ns, Np, t, uniforms, draws,
            mp.alpha, mp.f, mp.epsilon, mp.k, mp.kstar, mp.hbar, mp.V,
            t_end, max_events, vstar_stop_count,
            int(stop_on_v_absorbed), int(stop_on_vstar_absorbed),
            record_every, rec,
            int(genealogy), w_parent, m_parent, w_btime, m_btime, w_alive, m_alive,
            n_w, n_m, next_w, next_m, events, sup_Ns,
        )
        events += done
        if nrec:
            rows.extend(map(tuple, rec[:nrec]))
        if Nv == 0 and abs_v_t is None:
            abs_v_t = t
        if Ns == 0 and abs_vs_t is None:
            abs_vs_t = t
        if stop_code == 6:  # genealogy capacity; grow and resume
            if next_w >= w_parent.shape[0] - 2:
                w_parent = np.concatenate([w_parent, np.full(w_parent.shape[0], -1, dtype=np.int64)])
                w_btime = np.concatenate([w_btime, np.zeros(w_btime.shape[0])])
            if next_m >= m_parent.shape[0] - 2:
                m_parent = np.concatenate([m_parent, np.full(m_parent.shape[0], -1, dtype=np.int64)])
                m_btime = np.concatenate([m_btime, np.zeros(m_btime.shape[0])])
            if n_w >= w_alive.shape[0] - 2:
                w_alive = np.concatenate([w_alive, np.empty(w_alive.shape[0], dtype=np.int64)])
            if n_m >= m_alive.shape[0] - 2:
                m_alive = np.concatenate([m_alive, np.empty(m_alive.shape[0], dtype=np.int64)])
            continue
        if stop_code != 0:
            break

    if not rows or rows[-1][0] != t:
        rows.append((t, Nv, Ns, Np))
    arr = np.array(rows)
    reason = {1: "v_absorbed", 2: "vstar_absorbed", 3: "vstar_threshold",
              4: "t_end", 5: "budget"}[stop_code]
    wg = mg = None
    if genealogy:
        wg = Genealogy(parent=w_parent[:next_w].copy(), birth_time=w_btime[:next_w].copy(),
                       alive=w_alive[:n_w].copy(), n_founders=founders_w)
        mg = Genealogy(parent=m_parent[:next_m].copy(), birth_time=m_btime[:next_m].copy(),
                       alive=m_alive[:n_m].copy(), n_founders=founders_m)
    return BdPath(
        times=arr[:, 0],
        counts=arr[:, 1:].astype(np.int64),
        V=mp.V,
        mp=mp,
        sup_Nvstar=int(sup_Ns),
        absorbed_v=abs_v_t,
        absorbed_vstar=abs_vs_t,
        stop_reason=reason,
        events=events,
        wild_genealogy=wg,
        mutant_genealogy=mg,
    )
