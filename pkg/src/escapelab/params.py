"""Model parameters, nondimensionalization, equilibria and initial state.

The nondimensional system tracks u = (v, v*, p): scaled wild-type infected
cells, escape-mutant infected cells, and the CD8 predator.  Drift:

    dv/dt  = v  (1 - (v + v*) - p)
    dv*/dt = v* (f - (v + v*))
    dp/dt  = eps * p * (v - alpha * p)

The mutant has absolute fitness f in (0, 1); alpha = d/a balances predator
self-limitation against killing; eps = b/c is the predator/prey time-scale
ratio.  Everything downstream assumes the standing condition
f - alpha*(1 - f) > 0 (the mutant is fitter than the wild type at the
pre-mutation equilibrium), enforced once at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "DimensionalParams",
    "ModelParams",
    "SystemState",
    "Equilibria",
    "Scales",
    "nondimensionalize",
    "equilibria",
    "initial_state",
    "drift",
]


class ParamError(ValueError):
    """Invalid parameter set (domain or standing-assumption violation)."""


@dataclass(frozen=True)
class DimensionalParams:
    """Per-cell rates and interaction coefficients before rescaling.

    k, dk (wild), kstar, dkstar (mutant) and h (predator) are baseline
    birth/death rates in 1/time; a (killing), b (antigen-driven expansion),
    c and d (logistic competition) are in 1/(cells*time).
    """

    k: float
    dk: float
    kstar: float
    dkstar: float
    h: float
    a: float
    b: float
    c: float
    d: float
    V: float | None = None  # nominal population scale (cells); informational
    P: float | None = None
    T: float | None = None

    def __post_init__(self):
        for name in ("k", "dk", "kstar", "dkstar", "h", "a", "b", "c", "d"):
            if not getattr(self, name) > 0:
                raise ParamError(f"{name} must be strictly positive")
        for name in ("V", "P", "T"):
            val = getattr(self, name)
            if val is not None and not val > 0:
                raise ParamError(f"{name} must be strictly positive when given")
        if self.dk > self.k:
            raise ParamError("dk must not exceed k")
        if self.dkstar > self.kstar:
            raise ParamError("dkstar must not exceed kstar")


@dataclass(frozen=True)
class Scales:
    """Implied dimensional scales: T = 1/dk, V = dk/c cells, P = dk/a cells."""

    T: float
    V: float
    P: float


@dataclass(frozen=True)
class ModelParams:
    """Nondimensional parameter set.

    Exactly one of epsilon / beta / kappa selects the scaling mode:
    fixed epsilon, the beta-coupling eps = beta/log(V), or the critical
    kappa-coupling of epsilon_of_V.  `epsilon` is always resolved and
    available after construction.
    """

    alpha: float
    f: float
    k: float = 1.0
    kstar: float = 1.0
    V: float = 1e6
    epsilon: float | None = None
    beta: float | None = None
    kappa: float | None = None
    q: float = 4.0
    m: float = 0.6
    hbar: float = 1.0  # predator baseline rate h/dk; event counts only, not drift
    coexist_tol: float = 0.1

    def __post_init__(self):
        if not (0.0 < self.f < 1.0):
            raise ParamError(f"f must lie in (0, 1), got {self.f}")
        if self.alpha <= 0:
            raise ParamError("alpha must be positive")
        if self.f - self.alpha * (1.0 - self.f) <= 0:
            raise ParamError(
                f"standing assumption violated: f - alpha*(1-f) = "
                f"{self.f - self.alpha * (1.0 - self.f):.6g} <= 0"
            )
        if self.V < 1:
            raise ParamError("V must be >= 1")
        if self.q < 1:
            raise ParamError("q must be >= 1")
        if not (0.5 < self.m < 2.0 / 3.0):
            raise ParamError("m must lie in (1/2, 2/3)")
        if self.k <= 0 or self.kstar <= 0 or self.hbar <= 0:
            raise ParamError("k, kstar, hbar must be positive")
        modes = [m for m in ("epsilon", "beta", "kappa") if getattr(self, m) is not None]
        if len(modes) != 1:
            raise ParamError(
                f"exactly one of epsilon/beta/kappa must be set, got {modes or 'none'}"
            )
        if self.beta is not None:
            if self.beta <= 0:
                raise ParamError("beta must be positive")
            object.__setattr__(self, "epsilon", self.beta / math.log(self.V))
        elif self.kappa is not None:
            # Deferred import; epsilon_of_V needs phi_lim from asymptotics.
            from .asymptotics import epsilon_of_V, phi_lim

            if self.kappa <= 0:
                raise ParamError("kappa must be positive")
            object.__setattr__(
                self, "epsilon", epsilon_of_V(phi_lim(self.alpha, self.f), self.kappa, self.V)
            )
        if not (self.epsilon is not None and self.epsilon > 0):
            raise ParamError("resolved epsilon must be positive")

    @property
    def scaling_mode(self) -> str:
        if self.beta is not None:
            return "beta"
        if self.kappa is not None:
            return "kappa"
        return "epsilon"

    @property
    def threshold(self) -> float:
        """Stage-detection level eps**q."""
        return self.epsilon**self.q

    def with_(self, **kw) -> "ModelParams":
        """Copy with replacements; switching scaling value clears the others."""
        if any(key in kw for key in ("epsilon", "beta", "kappa")):
            base = {"epsilon": None, "beta": None, "kappa": None}
            base.update(kw)
            kw = base
        return replace(self, **kw)


@dataclass(frozen=True)
class SystemState:
    """The triple u = (v, v*, p) at nondimensional time t."""

    v: float
    vstar: float
    p: float
    t: float = 0.0

    def __post_init__(self):
        if self.v < 0 or self.vstar < 0 or self.p < 0:
            raise ParamError(f"state coordinates must be nonnegative: {self}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.v, self.vstar, self.p)


@dataclass(frozen=True)
class Equilibria:
    """Fixed points: wild-only u_W, mutant-only u_M, coexistence u_C."""

    u_W: SystemState
    u_M: SystemState
    u_C: SystemState


def nondimensionalize(dp: DimensionalParams) -> tuple[ModelParams, Scales]:
    """Map dimensional rates to ModelParams plus the implied scales.

    Scales are chosen so dk*T = 1, c*V*T = 1, a*P*T = 1; then
    ktilde = k/dk, kstartilde = kstar/dk, f = dkstar/dk, eps = b/c,
    alpha = d/a.
    """
    if dp.dk <= 0:
        raise ParamError("dk must be positive (sets the time scale)")
    if dp.c <= 0 or dp.a <= 0:
        raise ParamError("a and c must be positive (set the population scales)")
    T = 1.0 / dp.dk
    V = dp.dk / dp.c
    P = dp.dk / dp.a
    mp = ModelParams(
        alpha=dp.d / dp.a,
        f=dp.dkstar / dp.dk,
        k=dp.k / dp.dk,
        kstar=dp.kstar / dp.dk,
        V=V,
        epsilon=dp.b / dp.c,
        hbar=dp.h / dp.dk,
    )
    return mp, Scales(T=T, V=V, P=P)


def equilibria(mp: ModelParams) -> Equilibria:
    """The three steady states of the drift field."""
    a, f = mp.alpha, mp.f
    return Equilibria(
        u_W=SystemState(a / (1 + a), 0.0, 1.0 / (1 + a)),
        u_M=SystemState(0.0, f, 0.0),
        u_C=SystemState(a * (1 - f), f - a * (1 - f), 1 - f),
    )


def initial_state(mp: ModelParams) -> SystemState:
    """Pre-mutation equilibrium with one mutant cell: (alpha/(1+alpha), 1/V, 1/(1+alpha))."""
    a = mp.alpha
    return SystemState(a / (1 + a), 1.0 / mp.V, 1.0 / (1 + a), t=0.0)


def drift(state, mp: ModelParams):
    """Deterministic vector field at (v, vstar, p); accepts a SystemState or triple."""
    if isinstance(state, SystemState):
        v, vs, p = state.as_tuple()
    else:
        v, vs, p = state
    return (
        v * (1.0 - (v + vs) - p),
        vs * (mp.f - (v + vs)),
        mp.epsilon * p * (v - mp.alpha * p),
    )
