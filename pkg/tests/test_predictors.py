import math

import numpy as np
import pytest
from scipy.optimize import brentq

from escapelab import (
    ModelParams,
    ParamError,
    detect_stages,
    initial_state,
    integrate_ode,
    predict_stage_I,
    predict_stage_II,
    predict_stage_III,
    predict_stage_IV,
)


@pytest.fixture(scope="module")
def mp005():
    return ModelParams(alpha=1, f=0.8, epsilon=0.005, V=1e6)


class TestStageI:
    def test_spec_point(self, mp005):
        # direct evaluation of the increment formula at p(T_s) = 0.5
        pred = predict_stage_I(0.5, mp005)
        L = math.log(200)
        expected = (0.5
                    + (4 * 0.005 * L / 0.3) * 0.5 * (1 - 3 * 0.5)
                    + (0.005 / 0.3) * (0.0 - 0.25 * math.log(0.5)))
        assert pred.p_end == pytest.approx(expected, rel=1e-12)
        assert pred.p_end == pytest.approx(0.4146, abs=2e-4)
        assert pred.duration > 0

    def test_precondition(self, mp005):
        with pytest.raises(ParamError):
            predict_stage_I(0.2, mp005)  # delta = 0
        with pytest.raises(ParamError):
            predict_stage_I(0.1, mp005)


class TestStageII:
    def test_root_and_formula(self, mp005):
        pred = predict_stage_II(0.5, mp005)
        H = pred.aux["H_II"]
        # bisection oracle via an independent solver
        H_oracle = brentq(lambda x: 0.2 * x - math.log(1 + 0.5 * x), 1e-6, 100, xtol=1e-13)
        assert H == pytest.approx(H_oracle, abs=1e-9)
        assert H == pytest.approx(8.09, abs=5e-3)
        assert pred.p_end == pytest.approx(0.5 / (1 + 0.5 * H), rel=1e-12)
        assert pred.p_end == pytest.approx(0.0990, abs=1e-4)
        assert pred.duration == pytest.approx(H / 0.005, rel=1e-12)

    def test_residual_below_1e12(self, mp005):
        H = predict_stage_II(0.5, mp005).aux["H_II"]
        assert abs(0.2 * H - math.log(1 + 0.5 * H)) < 1e-12

    def test_degenerate_root_rejected(self, mp005):
        with pytest.raises(ParamError):
            predict_stage_II(0.2, mp005)  # p = 1 - f exactly


class TestStageIII:
    def test_mirror_formula(self, mp005):
        p = 0.0990
        pred = predict_stage_III(p, mp005)
        L = math.log(200)
        d = abs(p - 0.2)
        expected = (p + (4 * 0.005 * L / d) * p * (1 - 3 * p)
                    + (0.005 / d) * (p * (1 - 2 * p) * math.log(0.8) - p * p * math.log(1 - p)))
        assert pred.p_end == pytest.approx(expected, rel=1e-12)

    def test_precondition(self, mp005):
        with pytest.raises(ParamError):
            predict_stage_III(0.2, mp005)
        with pytest.raises(ParamError):
            predict_stage_III(0.5, mp005)


class TestStageIV:
    def test_root_oracle(self, mp005):
        pred = predict_stage_IV(0.105, mp005)
        H = pred.aux["H_IV"]
        H_oracle = brentq(lambda x: 0.2 * x - 0.5 * math.log(1 + 0.21 * (math.exp(x) - 1)),
                          1e-6, 50, xtol=1e-13)
        assert H == pytest.approx(H_oracle, abs=1e-9)
        assert abs(0.2 * H - 0.5 * math.log(1 + 0.21 * (math.exp(H) - 1))) < 1e-12
        eH = math.exp(H)
        assert pred.p_end == pytest.approx(0.105 * eH / (1 + 0.21 * (eH - 1)), rel=1e-12)

    def test_degenerate(self, mp005):
        with pytest.raises(ParamError):
            predict_stage_IV(0.2, mp005)


@pytest.fixture(scope="module")
def full_cycle_chain():
    """ODE hitting data at a point where all four stages exist (q = 1)."""
    out = {}
    for eps in (0.02, 0.01, 0.005):
        mp = ModelParams(alpha=0.25, f=0.6, epsilon=eps, q=1.0, V=1e6)
        traj = integrate_ode(mp, initial_state(mp), 16 / eps, tol=1e-11)
        c = detect_stages(traj, mp)[0]
        p = {t: float(traj.state_at(getattr(c, t))[2])
             for t in ("T_s", "T_I", "T_II", "T_III", "T_IV")}
        out[eps] = (mp, c, p)
    return out


class TestConvergenceToOde:
    def test_p_end_errors_decrease(self, full_cycle_chain):
        errs = {s: [] for s in "I II III IV".split()}
        for eps, (mp, c, p) in full_cycle_chain.items():
            errs["I"].append(abs(predict_stage_I(p["T_s"], mp).p_end - p["T_I"]))
            errs["II"].append(abs(predict_stage_II(p["T_I"], mp).p_end - p["T_II"]))
            errs["III"].append(abs(predict_stage_III(p["T_II"], mp).p_end - p["T_III"]))
            errs["IV"].append(abs(predict_stage_IV(p["T_III"], mp).p_end - p["T_IV"]))
        for stage, seq in errs.items():
            assert seq[0] > seq[1] > seq[2], (stage, seq)

    def test_duration_errors_decrease(self, full_cycle_chain):
        rel_I, rel_III, abs_II, abs_IV = [], [], [], []
        for eps, (mp, c, p) in full_cycle_chain.items():
            d_ode = {"I": c.T_I - c.T_s, "II": c.T_II - c.T_I,
                     "III": c.T_III - c.T_II, "IV": c.T_IV - c.T_III}
            rel_I.append(abs(predict_stage_I(p["T_s"], mp).duration - d_ode["I"]) / d_ode["I"])
            abs_II.append(abs(predict_stage_II(p["T_I"], mp).duration - d_ode["II"]))
            rel_III.append(abs(predict_stage_III(p["T_II"], mp).duration - d_ode["III"]) / d_ode["III"])
            abs_IV.append(abs(predict_stage_IV(p["T_III"], mp).duration - d_ode["IV"]))
        # the slowdown-root durations (II, IV) carry real orders: strictly decreasing
        for seq in (abs_II, abs_IV):
            assert seq[0] > seq[1] > seq[2], seq
        # the collapse durations (I, III) are order-only: assert endpoint convergence
        for seq in (rel_I, rel_III):
            assert seq[2] < seq[0], seq

    def test_stage_IV_profile_matches_ode(self, full_cycle_chain):
        mp, c, p = full_cycle_chain[0.005]
        traj = integrate_ode(mp, initial_state(mp), 16 / mp.epsilon, tol=1e-11)
        pred = predict_stage_IV(p["T_III"], mp)
        t_mid = 0.5 * (c.T_III + c.T_IV)
        vs_mid = float(traj.state_at(t_mid)[1])
        vs_TIII = float(traj.state_at(c.T_III)[1])
        g_ode = math.log(vs_mid / vs_TIII)
        g_pred = pred.vstar_profile(t_mid - c.T_III)
        assert g_pred == pytest.approx(g_ode, abs=0.15 * abs(g_ode))
