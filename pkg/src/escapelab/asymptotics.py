"""Closed-form outcome and bottleneck predictors.

Collects the limit functions phi_lim / psi_lim, the slowdown constants H,
H_II, H_IV, the failed-mutant probability, the critical epsilon(V)
coupling, the bottleneck scales Xi_II / Xi_IV with their kappa-scaling
limits, the Feller clock durations T_wild / T_mutant, outcome-probability
tables for both scaling regimes, and the coalescent durations
T_genetic_1/2 per terminal case.

Root finding is bisection on an expanding bracket throughout: every
equation here is monotone past the trivial root at 0, and robustness
beats speed for one-dimensional solves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .params import ModelParams, ParamError
from .rng import RngStream

__all__ = [
    "LimitFunctions",
    "OutcomeProbabilities",
    "BottleneckScale",
    "Regime",
    "phi_lim",
    "psi_lim",
    "solve_H",
    "solve_fhat",
    "epsilon_of_V",
    "p_failed",
    "p_failed_branching",
    "p_failed_diffusion",
    "t_wild",
    "t_mutant",
    "outcome_probs",
    "xi_II",
    "xi_IV",
    "t_genetic",
    "upsilon",
]


def _require_standing(alpha: float, f: float, closed: bool = False) -> None:
    if not (0 < f < 1):
        raise ParamError(f"f must lie in (0,1), got {f}")
    gap = f - alpha * (1 - f)
    if gap < 0 or (gap == 0 and not closed):
        raise ParamError(f"standing assumption violated at alpha={alpha}, f={f}")


def bisect_root(g, lo: float, hi: float, *, expand: bool = True, tol: float = 1e-14,
                max_expand: int = 200) -> float:
    """Bisection root of g on [lo, hi]; the upper bracket doubles until g flips sign."""
    glo = g(lo)
    if glo == 0.0:
        return lo
    if expand:
        n = 0
        while g(hi) * glo > 0:
            hi *= 2.0
            n += 1
            if n > max_expand:
                raise ParamError("bisection bracket expansion failed (no sign change)")
    elif g(hi) * glo > 0:
        raise ParamError(f"no sign change on [{lo}, {hi}]")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if gm * glo > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


class Regime(Enum):
    THM1_CASE1 = "Thm1_case1"  # phi_lim/beta >= 1
    THM1_CASE2 = "Thm1_case2"  # phi_lim/beta < 1 <= psi_lim/beta
    THM1_CASE3 = "Thm1_case3"  # both ratios < 1
    THM2_CRITICAL = "Thm2_critical"


@dataclass(frozen=True)
class LimitFunctions:
    phi_lim: float
    psi_lim: float
    H: float
    f_hat: float | None = None


@dataclass(frozen=True)
class OutcomeProbabilities:
    p_failed: float
    p_uW_failed: float
    p_uW_lost: float
    p_uM: float
    p_uC: float
    regime: Regime
    rho_W: float | None = None
    rho_M: float | None = None
    rho_M_stderr: float | None = None

    def masses(self) -> dict[str, float]:
        return {
            "uW_failed": self.p_uW_failed,
            "uW_lost": self.p_uW_lost,
            "uM": self.p_uM,
            "uC": self.p_uC,
        }


@dataclass(frozen=True)
class BottleneckScale:
    xi: float
    stage: str  # "II" or "IV"
    s_star: float
    phi_or_psi_at_star: float
    xi_limit: float | None = None


def phi_lim(alpha: float, f: float) -> float:
    """(1/alpha)[-(f - alpha(1-f)) + log(1/((1+alpha)(1-f)))].

    Zero at f = alpha/(1+alpha), strictly increasing, diverges at f -> 1.
    """
    _require_standing(alpha, f, closed=True)
    return (-(f - alpha * (1 - f)) + math.log(1.0 / ((1 + alpha) * (1 - f)))) / alpha


def solve_H(alpha: float, f: float) -> float:
    """Positive root of (1-f)H = (1/alpha) log(1 + (alpha/(1+alpha)) H)."""
    _require_standing(alpha, f)
    c = alpha / (1 + alpha)

    def g(H):
        return (1 - f) * H - math.log(1 + c * H) / alpha

    # g'(0) = (1-f) - 1/(1+alpha) < 0 under the standing assumption, so g dips
    # negative before the unique positive root; start just past 0.
    return bisect_root(g, 1e-9, 1.0)


def psi_lim(alpha: float, f: float) -> float:
    """Stage-IV analogue of phi_lim; zero at both endpoints with one interior max."""
    H = solve_H(alpha, f)
    A = f - alpha * (1 - f)
    first = -math.log(alpha * H / ((1 + alpha * (H + 1)) * A)) / (1 + alpha)
    second = (1 - f) * math.log((1 - f) * alpha * H / A)
    return first + second


def limit_functions(alpha: float, f: float) -> LimitFunctions:
    return LimitFunctions(phi_lim=phi_lim(alpha, f), psi_lim=psi_lim(alpha, f),
                          H=solve_H(alpha, f))


def solve_fhat(alpha: float, *, grid: int = 400) -> float:
    """f in (alpha/(1+alpha), 1) where phi_lim = psi_lim, by scan + bisection."""
    lo = alpha / (1 + alpha)
    fs = np.linspace(lo + 1e-6, 1 - 1e-6, grid)
    vals = [phi_lim(alpha, x) - psi_lim(alpha, x) for x in fs]
    for i in range(len(fs) - 1):
        if vals[i] == 0.0:
            return float(fs[i])
        if vals[i] * vals[i + 1] < 0:
            return bisect_root(
                lambda x: phi_lim(alpha, x) - psi_lim(alpha, x),
                float(fs[i]), float(fs[i + 1]), expand=False, tol=1e-13,
            )
    raise ParamError(
        f"no sign change of phi_lim - psi_lim on ({lo:.4f}, 1) for alpha={alpha}; "
        f"scan range [{min(vals):.3g}, {max(vals):.3g}]"
    )


def epsilon_of_V(phi: float, kappa: float, V: float) -> float:
    """Critical coupling: eps = phi (1/logV + (log logV)/2 (logV)^-2 - log(kappa sqrt(phi)) (logV)^-2)."""
    if V <= math.e**math.e:
        raise ParamError("V must exceed e^e for the log log V term")
    if kappa <= 0 or phi <= 0:
        raise ParamError("kappa and phi_lim must be positive")
    L = math.log(V)
    return phi * (1.0 / L + 0.5 * math.log(L) / L**2 - math.log(kappa * math.sqrt(phi)) / L**2)


def p_failed(alpha: float, f: float, kstar: float) -> float:
    """Failed-mutant probability as printed: exp[-4(f - alpha(1-f)) / ((k*+1)(alpha+1))].

    Note: the exact birth-death model does not reproduce this constant (see
    p_failed_branching / p_failed_diffusion and the repository README);
    this is the published closed form and is what the reporting uses.
    """
    _require_standing(alpha, f)
    return math.exp(-4.0 * (f - alpha * (1 - f)) / ((kstar + 1.0) * (alpha + 1.0)))


def p_failed_branching(alpha: float, f: float, kstar: float) -> float:
    """Exact early-stage extinction probability of the mutant lineage.

    While v* is rare the mutant count is a linear birth-death process with
    per-cell birth (k*+f)/2 and death (k*-f)/2 + alpha/(1+alpha); extinction
    from one cell is death/birth.
    """
    _require_standing(alpha, f)
    birth = (kstar + f) / 2.0
    death = (kstar - f) / 2.0 + alpha / (1 + alpha)
    return min(1.0, death / birth)


def p_failed_diffusion(alpha: float, f: float, kstar: float) -> float:
    """Feller-diffusion limit of the failed-mutant probability.

    Absorption of the mutant diffusion started at one cell:
    exp(-2 r / sigma^2) with growth r = f - v0 and noise sigma^2 = k* + v0,
    v0 = alpha/(1+alpha).
    """
    _require_standing(alpha, f)
    v0 = alpha / (1 + alpha)
    return math.exp(-2.0 * (f - v0) / (kstar + v0))


def upsilon(mp: ModelParams) -> float:
    """Upsilon = sqrt(1/(alpha(1-f)^2)) (alpha/(1+alpha)) kappa (the Xi_II limit)."""
    if mp.kappa is None:
        raise ParamError("upsilon requires kappa-scaling mode")
    a, f = mp.alpha, mp.f
    return math.sqrt(1.0 / (a * (1 - f) ** 2)) * (a / (1 + a)) * mp.kappa


def t_wild(mp: ModelParams) -> float:
    """Feller clock for the wild-type stage-II bottleneck: sqrt(2pi) (k+1) Upsilon."""
    return math.sqrt(2 * math.pi) * (mp.k + 1.0) * upsilon(mp)


def t_mutant(mp: ModelParams, eta_IV: float) -> float:
    """Feller clock for the mutant stage-IV bottleneck.

    eta_IV is the (surviving) wild bottleneck depth w[T_wild]; it enters
    through the stochastic O(eps) perturbation of p at the end of stage II,
    amplified over the O(1/eps) stage IV.
    """
    if mp.kappa is None:
        raise ParamError("t_mutant requires kappa-scaling mode")
    if eta_IV <= 0:
        raise ParamError("eta_IV must be positive (condition on wild survival)")
    a, f = mp.alpha, mp.f
    H = solve_H(a, f)
    A = f - a * (1 - f)
    return (
        math.sqrt(2 * math.pi / ((1 - f) * A))
        * (mp.kstar + f)
        * (1.0 / f)
        * ((1 + a * (1 + H)) / ((1 + a) * a * (1 + H))) ** H
        * eta_IV ** (a / H)
        * mp.kappa
    )


def outcome_probs(mp: ModelParams, rng: RngStream | None = None,
                  n_draws: int = 100_000, fhat_tol: float = 1e-6) -> OutcomeProbabilities:
    """Limit outcome masses for the configured scaling mode.

    beta mode branches on the phi_lim/beta and psi_lim/beta ratios (>= 1
    follows the table's convention); kappa mode requires f = f_hat(alpha)
    and estimates rho_M = E[exp(-2/T_mutant(eta_IV))] by Monte Carlo over
    eta_IV ~ w[T_wild] conditioned on survival.
    """
    pf = p_failed(mp.alpha, mp.f, mp.kstar)
    if mp.scaling_mode == "beta":
        ratio_phi = phi_lim(mp.alpha, mp.f) / mp.beta
        ratio_psi = psi_lim(mp.alpha, mp.f) / mp.beta
        if ratio_phi >= 1.0:
            return OutcomeProbabilities(
                p_failed=pf, p_uW_failed=pf, p_uW_lost=0.0, p_uM=1.0 - pf, p_uC=0.0,
                regime=Regime.THM1_CASE1,
            )
        if ratio_psi >= 1.0:
            return OutcomeProbabilities(
                p_failed=pf, p_uW_failed=pf, p_uW_lost=1.0 - pf, p_uM=0.0, p_uC=0.0,
                regime=Regime.THM1_CASE2,
            )
        return OutcomeProbabilities(
            p_failed=pf, p_uW_failed=pf, p_uW_lost=0.0, p_uM=0.0, p_uC=1.0 - pf,
            regime=Regime.THM1_CASE3,
        )
    if mp.scaling_mode != "kappa":
        raise ParamError("outcome_probs needs beta- or kappa-scaling mode")

    fh = solve_fhat(mp.alpha)
    if abs(mp.f - fh) > fhat_tol:
        raise ParamError(
            f"kappa-mode outcome table is stated at f = f_hat(alpha) = {fh:.8f}; "
            f"got f = {mp.f} (use solve_fhat)"
        )
    Tw = t_wild(mp)
    rho_W = math.exp(-2.0 / Tw)
    # rho_M = E[exp(-2/T_mutant(eta))], eta ~ w[T_wild] | survival.
    from .feller import sample_transition_values

    gen = (rng or RngStream(0)).generator()
    etas = np.empty(0)
    while etas.size < n_draws:
        block = sample_transition_values(1.0, Tw, gen, max(n_draws, 4 * n_draws // 3))
        etas = np.concatenate([etas, block[block > 0.0]])
    etas = etas[:n_draws]
    surv = np.exp(-2.0 / np.array([t_mutant(mp, float(e)) for e in etas]))
    rho_M = float(surv.mean())
    rho_M_se = float(surv.std(ddof=1) / math.sqrt(n_draws))
    return OutcomeProbabilities(
        p_failed=pf,
        p_uW_failed=pf,
        p_uW_lost=(1 - pf) * (1 - rho_W) * rho_M,
        p_uM=(1 - pf) * rho_W,
        p_uC=(1 - pf) * (1 - rho_W) * (1 - rho_M),
        regime=Regime.THM2_CRITICAL,
        rho_W=rho_W,
        rho_M=rho_M,
        rho_M_stderr=rho_M_se,
    )


def xi_II(mp: ModelParams, p_TI: float, v_TI: float, t_entry: float = 0.0) -> BottleneckScale:
    """Stage-II bottleneck scale from stage-entry values.

    s_II = eps*T_I + delta/(alpha(1-f)p(T_I)) locates the minimum of v;
    phi(s_II/eps) = (-1/(alpha eps))[-delta/p + log(1 + delta/(1-f))];
    Xi_II = sqrt(1/(alpha(1-f)^2)) exp(-phi)/(V v(T_I) sqrt(eps)).
    """
    a, f, eps = mp.alpha, mp.f, mp.epsilon
    delta = p_TI - (1 - f)
    if delta <= 0:
        raise ParamError(f"stage II needs p(T_I) > 1-f, got p={p_TI}")
    if v_TI <= 0:
        raise ParamError("v(T_I) must be positive")
    s_star = eps * t_entry + delta / (a * (1 - f) * p_TI)
    phi_star = (-1.0 / (a * eps)) * (-delta / p_TI + math.log(1 + delta / (1 - f)))
    xi = math.sqrt(1.0 / (a * (1 - f) ** 2)) * math.exp(-phi_star) / (mp.V * v_TI * math.sqrt(eps))
    lim = upsilon(mp) if mp.kappa is not None else None
    return BottleneckScale(xi=xi, stage="II", s_star=s_star,
                           phi_or_psi_at_star=phi_star, xi_limit=lim)


def xi_IV(mp: ModelParams, p_TIII: float, v_TIII: float, t_entry: float = 0.0,
          eta_IV: float | None = None) -> BottleneckScale:
    """Stage-IV bottleneck scale from stage-entry values.

    v_TIII is the collapsing coordinate's entry value (the mutant density,
    eps**q at a detected T_III).  The kappa-scaling limit requires the
    stage-II depth eta_IV and equals T_mutant/(sqrt(2pi)(k*+f)).
    """
    a, f, eps = mp.alpha, mp.f, mp.epsilon
    A = f - a * (1 - f)
    if p_TIII >= 1 - f:
        raise ParamError(f"stage IV needs p(T_III) < 1-f, got p={p_TIII}")
    if p_TIII <= 0 or v_TIII <= 0:
        raise ParamError("p(T_III) and the entry density must be positive")
    one_m = 1 - (1 + a) * p_TIII
    s_star = eps * t_entry + math.log((1 - f) * one_m / (A * p_TIII))
    psi_star = (1.0 / eps) * (
        math.log(one_m / A) / (1 + a)
        - (1 - f) * math.log((1 - f) * one_m / (A * p_TIII))
    )
    xi = math.sqrt(1.0 / ((1 - f) * A)) * math.exp(-psi_star) / (mp.V * v_TIII * math.sqrt(eps))
    lim = None
    if mp.kappa is not None and eta_IV is not None:
        lim = t_mutant(mp, eta_IV) / (math.sqrt(2 * math.pi) * (mp.kstar + f))
    return BottleneckScale(xi=xi, stage="IV", s_star=s_star,
                           phi_or_psi_at_star=psi_star, xi_limit=lim)


def t_genetic(mp: ModelParams, case: str, rng: RngStream | np.random.Generator,
              em_steps: int = 20_000) -> tuple[float, float | None]:
    """Kingman durations (T_genetic_1, T_genetic_2) per terminal case.

    failed -> (0, None); wild_lost -> (inf, None); mutant_lost and
    coexistence draw Upsilon * int_0^{sqrt(2pi)} ds / w[Upsilon (k+1) s]
    over a surviving Feller path (absorbed paths belong to the wild-lost
    branch and are redrawn); coexistence additionally returns inf for the
    fully-coalesced mutant side.
    """
    if case == "failed":
        return 0.0, None
    if case == "wild_lost":
        return math.inf, None
    if case not in ("mutant_lost", "coexistence"):
        raise ParamError(f"unknown case {case!r}")
    from .feller import sample_path_integral

    ups = upsilon(mp)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    smax = math.sqrt(2 * math.pi)
    while True:
        res = sample_path_integral(1.0, smax, ups * (mp.k + 1.0), gen, n_steps=em_steps)
        if not res.absorbed:
            t1 = ups * res.value
            break
    return (t1, math.inf) if case == "coexistence" else (t1, None)
