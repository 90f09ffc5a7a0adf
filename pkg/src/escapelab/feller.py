"""The Feller diffusion dw = sqrt(w) dB: absorption law, exact transition
sampling, and the inverse-path integrals feeding the coalescent durations.

The exact transition uses the compound Poisson-Gamma representation:
draw N ~ Poisson(2 w0/t); N = 0 means absorbed, otherwise the value is
Gamma(N, t/2).  Its Laplace transform exp(-w0 lam/(1 + lam t/2)) is the
Feller transition's, and P(N=0) = exp(-2 w0/t) recovers the absorption
law, but per the repo's dual-route rule the sampler is gated behind the
fine-step EM oracle in tests before anything downstream trusts it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .params import ParamError
from .rng import RngStream

__all__ = [
    "FellerSample",
    "PathIntegralResult",
    "absorption_prob",
    "sample_transition",
    "sample_transition_values",
    "sample_path_integral",
    "em_transition_values",
]

_W_FLOOR = 1e-300  # integrand guard inside the EM integral, never a state floor


@dataclass(frozen=True)
class FellerSample:
    value: float
    absorbed: bool
    duration: float
    w0: float


@dataclass(frozen=True)
class PathIntegralResult:
    """Trapezoid of int_0^{s_max} ds / w[a s], or the absorbed flag."""

    value: float
    absorbed: bool
    w_end: float


def _as_generator(rng) -> np.random.Generator:
    return rng.generator() if isinstance(rng, RngStream) else rng


def absorption_prob(w0: float, t: float) -> float:
    """P(w[t] = 0 | w[0] = w0) = exp(-2 w0 / t); 1 when started absorbed."""
    if w0 < 0:
        raise ParamError("w0 must be nonnegative")
    if t <= 0:
        # t = 0 with w0 > 0 would be 0, but is rejected to avoid the 0/0
        # convention at w0 = 0; callers pass a positive duration.
        raise ParamError("t must be positive")
    if w0 == 0.0:
        return 1.0
    return math.exp(-2.0 * w0 / t)


def sample_transition(w0: float, t: float, rng) -> FellerSample:
    """One exact draw of w[t] given w[0] = w0."""
    if w0 < 0 or t < 0:
        raise ParamError("w0 and t must be nonnegative")
    if w0 == 0.0:
        return FellerSample(0.0, True, t, w0)
    if t == 0.0:
        return FellerSample(w0, False, 0.0, w0)
    gen = _as_generator(rng)
    n = gen.poisson(2.0 * w0 / t)
    if n == 0:
        return FellerSample(0.0, True, t, w0)
    return FellerSample(float(gen.gamma(shape=n, scale=t / 2.0)), False, t, w0)


def sample_transition_values(w0: float, t: float, rng, size: int) -> np.ndarray:
    """Vector of exact w[t] draws (zeros mark absorption)."""
    if w0 < 0 or t < 0:
        raise ParamError("w0 and t must be nonnegative")
    gen = _as_generator(rng)
    if w0 == 0.0:
        return np.zeros(size)
    if t == 0.0:
        return np.full(size, w0)
    n = gen.poisson(2.0 * w0 / t, size=size)
    out = np.zeros(size)
    alive = n > 0
    if alive.any():
        out[alive] = gen.gamma(shape=n[alive], scale=t / 2.0)
    return out


def sample_path_integral(w0: float, s_max: float, a: float, rng,
                         n_steps: int = 20_000, noise: bool = True,
                         chunk: int = 65_536) -> PathIntegralResult:
    """One draw of int_0^{s_max} ds / w[a s] along a fine-step EM path.

    The path runs on [0, a*s_max] with at least n_steps EM steps; hitting
    zero returns the absorbed flag (the conditioned-on-survival quantity
    is the caller's concern).  noise=False is the test hook: w stays at
    w0 and the closed form s_max/w0 comes back exactly.
    """
    if w0 <= 0 or s_max <= 0 or a <= 0:
        raise ParamError("w0, s_max and a must be positive")
    if not noise:
        return PathIntegralResult(s_max / w0, False, w0)
    gen = _as_generator(rng)
    horizon = a * s_max
    n_steps = max(int(n_steps), 10_000)
    dt = horizon / n_steps
    w, s, integral = float(w0), 0.0, 0.0
    done = 0
    while done < n_steps:
        block = gen.standard_normal(min(chunk, n_steps - done))
        steps, w, s, integral, absorbed = _kernels.feller_em_segment(
            w, s, dt, block, integral, _W_FLOOR
        )
        done += steps
        if absorbed:
            return PathIntegralResult(math.inf, True, 0.0)
        if steps < block.shape[0]:  # defensive; only absorption stops early
            break
    # integral accumulated in tau = a*s time; substitute back
    return PathIntegralResult(integral / a, False, w)


def em_transition_values(w0: float, t: float, rng, size: int,
                         dt: float = 1e-4) -> np.ndarray:
    """Fine-step EM oracle for the transition law (vectorized across paths).

    Full-truncation EM of dw = sqrt(max(w,0)) dB observed at t; paths at or
    below zero are absorbed to exactly 0.  Used to gate sample_transition.
    """
    gen = _as_generator(rng)
    n_steps = max(1, int(round(t / dt)))
    dt = t / n_steps
    sq_dt = math.sqrt(dt)
    w = np.full(size, float(w0))
    for _ in range(n_steps):
        alive = w > 0.0
        if not alive.any():
            break
        z = gen.standard_normal(size)
        w = w + np.sqrt(np.maximum(w, 0.0)) * sq_dt * z
        w[w <= 0.0] = 0.0
        w[~alive] = 0.0
    return w
