# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Hot loops: Euler-Maruyama stepper, Gillespie event loop, Feller EM path.

All randomness arrives as caller-generated draw blocks (normals/uniforms
from a Philox stream), so results are bitwise identical to the pure-Python
fallback, which consumes the same blocks in the same order.  Each function
advances one path through at most one block and returns where it stopped;
the Python wrappers own chunking, recording buffers and resume logic.

Stop codes shared with escapelab._kernels.fallback:
    0 block exhausted          3 vstar threshold reached
    1 v absorbed (stop set)    4 t_end reached
    2 vstar absorbed (stop)    5 event budget exhausted
                               6 genealogy capacity exhausted
"""

from libc.math cimport sqrt, log

import numpy as np


def sde_em_segment(double v, double vs, double p, double t,
                   double dt, double[:, ::1] normals,
                   double alpha, double f, double eps,
                   double k, double kstar, double V,
                   double hbar, double p_scale, int p_noise,
                   double absorb_floor,
                   double vstar_stop,
                   int stop_on_v_absorbed, int stop_on_vs_absorbed,
                   long record_every, double[:, ::1] rec,
                   double tau_v, double tau_vs, double sup_vs,
                   long step0):
    """Advance one SDE path by at most normals.shape[0] EM steps.

    Records (t, v, vs, p, tau_v, tau_vs) every record_every-th step into
    rec; tau_* are running trapezoid integrals of 1/(V x) over the alive
    window.  Returns (steps_done, state..., accumulators..., absorption
    step indices or -1, rows recorded, stop code).
    """
    cdef long n = normals.shape[0]
    cdef long i, nrec = 0
    cdef long abs_v = -1, abs_vs = -1
    cdef double inv_V = 0.0 if V != V or V == float("inf") else 1.0 / V
    cdef double sq_dt = sqrt(dt)
    cdef double dv, dvs, dp, tot, g_v, g_vs, g_p
    cdef double v_old, vs_old
    cdef int stop = 0
    cdef long steps = 0

    for i in range(n):
        v_old = v
        vs_old = vs
        tot = v + vs
        dv = v * (1.0 - tot - p) * dt
        dvs = vs * (f - tot) * dt
        dp = eps * p * (v - alpha * p) * dt
        g_v = sqrt((v if v > 0.0 else 0.0) * (k + tot + p) * inv_V)
        g_vs = sqrt((vs if vs > 0.0 else 0.0) * (kstar + tot) * inv_V)
        v = v + dv + g_v * sq_dt * normals[i, 0]
        vs = vs + dvs + g_vs * sq_dt * normals[i, 1]
        if p_noise:
            g_p = sqrt(eps * (p if p > 0.0 else 0.0) * (hbar + v_old + alpha * p) / p_scale)
            p = p + dp + g_p * sq_dt * normals[i, 2]
            if p < 0.0:
                p = 0.0
        else:
            p = p + dp
        t = t + dt
        steps += 1
        if abs_v < 0:
            if v <= absorb_floor:
                v = 0.0
                abs_v = step0 + steps
            elif v_old > 0.0:
                tau_v += 0.5 * (1.0 / v_old + 1.0 / v) * dt * inv_V
        if abs_vs < 0:
            if vs <= absorb_floor:
                vs = 0.0
                abs_vs = step0 + steps
            elif vs_old > 0.0:
                tau_vs += 0.5 * (1.0 / vs_old + 1.0 / vs) * dt * inv_V
        if vs > sup_vs:
            sup_vs = vs
        if record_every > 0 and (step0 + steps) % record_every == 0:
            rec[nrec, 0] = t
            rec[nrec, 1] = v
            rec[nrec, 2] = vs
            rec[nrec, 3] = p
            rec[nrec, 4] = tau_v
            rec[nrec, 5] = tau_vs
            nrec += 1
        if stop_on_v_absorbed and abs_v >= 0:
            stop = 1
            break
        if stop_on_vs_absorbed and abs_vs >= 0:
            stop = 2
            break
        if vstar_stop > 0.0 and vs >= vstar_stop:
            stop = 3
            break

    return steps, v, vs, p, t, tau_v, tau_vs, sup_vs, abs_v, abs_vs, nrec, stop


def bd_gillespie_segment(long Nv, long Ns, long Np, double t,
                         double[::1] uniforms, long draws_per_event,
                         double alpha, double f, double eps,
                         double k, double kstar, double hbar, double V,
                         double t_end, long max_events,
                         long vstar_stop_count,
                         int stop_on_v_absorbed, int stop_on_vs_absorbed,
                         long record_every, double[:, ::1] rec,
                         int genealogy,
                         long[::1] w_parent, long[::1] m_parent,
                         double[::1] w_btime, double[::1] m_btime,
                         long[::1] w_alive, long[::1] m_alive,
                         long n_w_alive, long n_m_alive,
                         long next_w_id, long next_m_id,
                         long events0, long sup_Ns):
    """Advance one exact birth-death path through at most one uniform block.

    Six channels; per-cell rates (scaled time): wild (k+1)/2 | (k-1)/2 +
    (v+vs) + p; mutant (k*+f)/2 | (k*-f)/2 + (v+vs); predator slowed by
    eps: eps(h/2 + v) | eps(h/2 + alpha p).  Consumes draws_per_event
    uniforms per event (2, or 3 with genealogy: the third picks the parent
    at a tracked birth or the victim at a tracked death).
    """
    cdef long n_events_avail = uniforms.shape[0] // draws_per_event
    cdef long ev, nrec = 0
    cdef double r_wb, r_wd, r_mb, r_md, r_pb, r_pd, R, u, acc
    cdef double v, vs, p
    cdef double tau_exp
    cdef long events = 0
    cdef int stop = 0
    cdef long idx, j
    cdef double inv_V = 1.0 / V

    for ev in range(n_events_avail):
        if events0 + events >= max_events:
            stop = 5
            break
        if Nv == 0 and Ns == 0:
            # no prey left; predator decays irrelevantly -- freeze
            stop = 4
            t = t_end
            break
        v = Nv * inv_V
        vs = Ns * inv_V
        p = Np * inv_V
        r_wb = Nv * (k + 1.0) * 0.5
        r_wd = Nv * ((k - 1.0) * 0.5 + (v + vs) + p)
        r_mb = Ns * (kstar + f) * 0.5
        r_md = Ns * ((kstar - f) * 0.5 + (v + vs))
        r_pb = Np * eps * (hbar * 0.5 + v)
        r_pd = Np * eps * (hbar * 0.5 + alpha * p)
        R = r_wb + r_wd + r_mb + r_md + r_pb + r_pd
        if R <= 0.0:
            stop = 4
            t = t_end
            break
        u = uniforms[ev * draws_per_event]
        if u <= 0.0:
            u = 1e-300
        tau_exp = -log(u) / R
        if t + tau_exp > t_end:
            t = t_end
            stop = 4
            break
        t = t + tau_exp
        events += 1
        u = uniforms[ev * draws_per_event + 1] * R
        if u < r_wb:
            Nv += 1
            if genealogy:
                if next_w_id >= w_parent.shape[0] or n_w_alive >= w_alive.shape[0]:
                    stop = 6
                    Nv -= 1
                    t = t - tau_exp
                    events -= 1
                    break
                idx = <long>(uniforms[ev * draws_per_event + 2] * n_w_alive)
                if idx >= n_w_alive:
                    idx = n_w_alive - 1
                w_parent[next_w_id] = w_alive[idx]
                w_btime[next_w_id] = t
                w_alive[n_w_alive] = next_w_id
                n_w_alive += 1
                next_w_id += 1
        elif u < r_wb + r_wd:
            Nv -= 1
            if genealogy:
                idx = <long>(uniforms[ev * draws_per_event + 2] * n_w_alive)
                if idx >= n_w_alive:
                    idx = n_w_alive - 1
                w_alive[idx] = w_alive[n_w_alive - 1]
                n_w_alive -= 1
        elif u < r_wb + r_wd + r_mb:
            Ns += 1
            if Ns > sup_Ns:
                sup_Ns = Ns
            if genealogy:
                if next_m_id >= m_parent.shape[0] or n_m_alive >= m_alive.shape[0]:
                    stop = 6
                    Ns -= 1
                    t = t - tau_exp
                    events -= 1
                    break
                idx = <long>(uniforms[ev * draws_per_event + 2] * n_m_alive)
                if idx >= n_m_alive:
                    idx = n_m_alive - 1
                m_parent[next_m_id] = m_alive[idx]
                m_btime[next_m_id] = t
                m_alive[n_m_alive] = next_m_id
                n_m_alive += 1
                next_m_id += 1
        elif u < r_wb + r_wd + r_mb + r_md:
            Ns -= 1
            if genealogy:
                idx = <long>(uniforms[ev * draws_per_event + 2] * n_m_alive)
                if idx >= n_m_alive:
                    idx = n_m_alive - 1
                m_alive[idx] = m_alive[n_m_alive - 1]
                n_m_alive -= 1
        elif u < r_wb + r_wd + r_mb + r_md + r_pb:
            Np += 1
        else:
            Np -= 1
        if record_every > 0 and (events0 + events) % record_every == 0:
            rec[nrec, 0] = t
            rec[nrec, 1] = Nv
            rec[nrec, 2] = Ns
            rec[nrec, 3] = Np
            nrec += 1
        if stop_on_v_absorbed and Nv == 0:
            stop = 1
            break
        if stop_on_vs_absorbed and Ns == 0:
            stop = 2
            break
        if vstar_stop_count > 0 and Ns >= vstar_stop_count:
            stop = 3
            break

    return (events, Nv, Ns, Np, t, nrec, stop,
            n_w_alive, n_m_alive, next_w_id, next_m_id, sup_Ns)


def feller_em_segment(double w, double s, double dt, double[::1] normals,
                      double integral, double w_floor):
    """Advance dw = sqrt(w) dB by EM, accumulating the trapezoid of 1/w.

    Absorbs (and stops) when a step lands at or below zero.  w_floor only
    guards the 1/w integrand against overflow.
    """
    cdef long n = normals.shape[0]
    cdef long i
    cdef double w_old
    cdef double sq_dt = sqrt(dt)
    cdef int absorbed = 0
    cdef long steps = 0

    for i in range(n):
        w_old = w
        w = w + sqrt(w if w > 0.0 else 0.0) * sq_dt * normals[i]
        s = s + dt
        steps += 1
        if w <= 0.0:
            w = 0.0
            absorbed = 1
            break
        integral += 0.5 * (1.0 / (w_old if w_old > w_floor else w_floor)
                           + 1.0 / (w if w > w_floor else w_floor)) * dt
    return steps, w, s, integral, absorbed
