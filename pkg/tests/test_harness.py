import math
import os

import numpy as np
import pytest

from escapelab import ModelParams, RngStream
from escapelab.asymptotics import OutcomeProbabilities, Regime, phi_lim
from escapelab.feller import absorption_prob, sample_transition_values
from escapelab.harness import CampaignSummary, ExperimentSpec, compare, run_campaign
from escapelab.outcomes import OutcomeLabel
from escapelab.stats import freq_ci


def small_spec(tmp_path=None, **kw):
    mp = ModelParams(alpha=1, f=0.8, beta=2 * phi_lim(1, 0.8), V=1e4)
    defaults = dict(mp=mp, fidelity="sde", n_paths=40, seed=7, t_end=150.0,
                    dt=mp.epsilon / 12, outputs=str(tmp_path) if tmp_path else None)
    defaults.update(kw)
    return ExperimentSpec(**defaults)


def test_dry_run_predictions_only(tmp_path):
    spec = small_spec(tmp_path, dry_run=True, n_paths=0)
    s = run_campaign(spec)
    assert s.n_effective == 0
    assert s.predicted is not None and s.predicted.regime is Regime.THM1_CASE3
    assert os.path.exists(tmp_path / "predictor_report.csv")
    assert os.path.exists(tmp_path / "summary.csv")


def test_counts_sum_and_outputs(tmp_path):
    s = run_campaign(small_spec(tmp_path))
    assert sum(s.counts.values()) == s.n_effective == 40
    assert os.path.exists(tmp_path / "outcomes.csv")
    with open(tmp_path / "outcomes.csv") as fh:
        assert len(fh.readlines()) == 41


def test_bitwise_determinism_and_worker_independence(tmp_path):
    out1, out2, out3 = (tmp_path / d for d in ("a", "b", "c"))
    run_campaign(small_spec(out1))
    run_campaign(small_spec(out2))
    run_campaign(small_spec(out3, workers=3))
    for name in ("outcomes.csv", "summary.csv", "predictor_report.csv"):
        b1 = (out1 / name).read_bytes()
        assert b1 == (out2 / name).read_bytes(), name
        assert b1 == (out3 / name).read_bytes(), name


def test_failures_recorded_not_raised(tmp_path):
    # an unreachable probe of the horizon: force failure by a bad dt via monkeypatch-free
    # route: n_paths small with absurd max_events on bd to trip budget is NOT an error;
    # instead check the failures plumbing stays empty on a healthy run
    s = run_campaign(small_spec(tmp_path))
    assert s.failures == []


def synthetic_summary(freqs, n, predicted):
    counts = {label.value: int(round(freqs.get(label.value, 0.0) * n)) for label in OutcomeLabel}
    z = {}
    from escapelab.harness import MASS_OF_LABEL
    from escapelab.stats import z_score

    for label, mass in MASS_OF_LABEL.items():
        z[mass] = z_score(counts[label.value], n, predicted.masses()[mass])
    return CampaignSummary(
        spec=None, counts=counts, n_effective=n,
        freqs={k: c / n for k, c in counts.items()},
        cis={k: freq_ci(c, n) for k, c in counts.items()},
        predicted=predicted, prediction_note="synthetic", z=z, outcomes=[],
    )


def make_predicted(pf=0.4):
    return OutcomeProbabilities(p_failed=pf, p_uW_failed=pf, p_uW_lost=0.0,
                                p_uM=0.0, p_uC=1 - pf, regime=Regime.THM1_CASE3)


def test_compare_pass_when_frequency_equals_prediction():
    pred = make_predicted(0.4)
    s = synthetic_summary({"FailedMutant": 0.4, "Coexistence": 0.6}, 1000, pred)
    rep = compare(s)
    assert rep.verdict == "PASS" and rep.worst_z == 0.0


def test_compare_fails_on_wrong_prediction():
    pred = make_predicted(0.2)  # deliberately halved
    s = synthetic_summary({"FailedMutant": 0.4, "Coexistence": 0.6}, 1000, pred)
    rep = compare(s)
    assert rep.verdict == "FAIL" and rep.worst_z > 3


def test_compare_distribution_pvalues():
    pred = make_predicted(0.4)
    s = synthetic_summary({"FailedMutant": 0.4, "Coexistence": 0.6}, 1000, pred)
    s.pvalues["bottleneck_feller"] = 0.002
    rep = compare(s)
    assert rep.verdict == "FAIL"


def test_ci_coverage_calibration():
    # nominal 95% CIs cover an analytically known truth >= 90% of the time
    truth = absorption_prob(1.0, 2.0)
    n_draws, covered = 2000, 0
    for rep in range(50):
        vals = sample_transition_values(1.0, 2.0, RngStream(1000, rep).generator(), n_draws)
        lo, hi = freq_ci(int((vals == 0).sum()), n_draws)
        covered += lo <= truth <= hi
    assert covered >= 45
