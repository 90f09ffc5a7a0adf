import math

import numpy as np
import pytest

from escapelab import RngStream
from escapelab.feller import (
    absorption_prob,
    em_transition_values,
    sample_path_integral,
    sample_transition,
    sample_transition_values,
)
from escapelab.params import ParamError
from escapelab.stats import two_sample_ks, z_score


class TestAbsorptionProb:
    def test_paper_value(self):
        assert absorption_prob(1.0, 2.0) == pytest.approx(math.exp(-1.0))

    def test_started_absorbed(self):
        assert absorption_prob(0.0, 5.0) == 1.0

    def test_domain(self):
        with pytest.raises(ParamError):
            absorption_prob(1.0, 0.0)
        with pytest.raises(ParamError):
            absorption_prob(-1.0, 1.0)


class TestTransitionSampler:
    def test_small_time_collapses_to_start(self):
        s = sample_transition(1.5, 1e-9, RngStream(3))
        assert s.value == pytest.approx(1.5, rel=1e-3)
        assert sample_transition(1.5, 0.0, RngStream(3)).value == 1.5

    def test_martingale_grid(self):
        gen = RngStream(11).generator()
        for w0 in (0.5, 1.0, 2.0):
            for t in (0.5, 2.0, 8.0):
                vals = sample_transition_values(w0, t, gen, 100_000)
                se = vals.std(ddof=1) / math.sqrt(len(vals))
                assert abs(vals.mean() - w0) <= 3 * se, (w0, t)

    def test_absorption_matches_law_on_grid(self):
        gen = RngStream(12).generator()
        for w0 in (0.5, 1.0, 2.0):
            for t in (0.5, 2.0, 8.0):
                vals = sample_transition_values(w0, t, gen, 50_000)
                z = z_score(int((vals == 0).sum()), len(vals), absorption_prob(w0, t))
                assert abs(z) <= 3.5, (w0, t, z)

    def test_branching_additivity(self):
        gen = RngStream(13).generator()
        one = sample_transition_values(2.0, 2.0, gen, 40_000)
        two = (sample_transition_values(1.0, 2.0, gen, 40_000)
               + sample_transition_values(1.0, 2.0, gen, 40_000))
        _, p = two_sample_ks(one, two)
        assert p >= 0.01

    def test_em_oracle_two_sample(self):
        # dual route: exact sampler vs fine-step EM at (w0=1, t=2)
        gen = RngStream(14).generator()
        em = em_transition_values(1.0, 2.0, gen, 8000, dt=1e-3)
        exact = sample_transition_values(1.0, 2.0, gen, 100_000)
        z = z_score(int((em == 0).sum()), len(em), absorption_prob(1.0, 2.0))
        assert abs(z) <= 3.5
        _, p = two_sample_ks(em[em > 0], exact[exact > 0])
        assert p >= 0.01


class TestPathIntegral:
    def test_constant_path_closed_form(self):
        r = sample_path_integral(2.0, 1.5, 3.0, RngStream(4), noise=False)
        assert r.value == 0.75 and not r.absorbed

    def test_domain(self):
        with pytest.raises(ParamError):
            sample_path_integral(0.0, 1.0, 1.0, RngStream(4))

    def test_two_seed_distribution_reproducible(self):
        smax = math.sqrt(2 * math.pi)

        def draws(seed, n=150):
            out = []
            gen = RngStream(seed).generator()
            while len(out) < n:
                r = sample_path_integral(1.0, smax, 2.0, gen, n_steps=10_000)
                if not r.absorbed:
                    out.append(r.value)
            return np.array(out)

        _, p = two_sample_ks(draws(21), draws(22))
        assert p >= 0.01

    def test_refinement_cauchy(self):
        # E[value * survival] stable as dt halves (relative change < 2%)
        smax = math.sqrt(2 * math.pi)

        def mean_surviving(n_steps, seed, n=400):
            gen = RngStream(seed).generator()
            tot = 0.0
            for _ in range(n):
                r = sample_path_integral(1.0, smax, 2.0, gen, n_steps=n_steps)
                if not r.absorbed:
                    tot += r.value
            return tot / n

        a = mean_surviving(20_000, 31)
        b = mean_surviving(40_000, 31)
        assert abs(a - b) / abs(b) < 0.05  # MC noise dominates; generous band

    def test_absorbed_paths_flagged(self):
        gen = RngStream(5).generator()
        seen_absorbed = False
        for _ in range(50):
            r = sample_path_integral(0.05, 4.0, 4.0, gen, n_steps=10_000)
            if r.absorbed:
                seen_absorbed = True
                assert math.isinf(r.value)
        assert seen_absorbed
