import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from escapelab import ModelParams, RngStream
from escapelab.coalescent import (
    LineagePartition,
    LineageError,
    birth_weighted_factor,
    kingman_sample,
    predict_partition,
    track_lineages,
)
from escapelab.outcomes import OutcomeLabel
from escapelab.params import ParamError
from escapelab.stats import partition_two_sample_test, z_score
from test_outcomes import synthetic_path


class TestPartitionType:
    def test_validation(self):
        with pytest.raises(ParamError):
            LineagePartition(n0=2, blocks=(3,), n=3)
        with pytest.raises(ParamError):
            LineagePartition(n0=2, blocks=(1, 2), n=3)  # not sorted desc
        p = LineagePartition.from_sizes([1, 3, 2])
        assert p.blocks == (3, 2, 1) and p.key() == "3;2;1"

    @given(st.integers(1, 25), st.floats(0.0, 5.0))
    @settings(max_examples=40, deadline=None)
    def test_kingman_partition_invariants(self, n, t):
        r = kingman_sample(n, t, RngStream(5, n).generator())
        assert sum(r.partition.blocks) == n
        assert 1 <= r.partition.n0 <= n


class TestKingman:
    def test_zero_duration(self):
        r = kingman_sample(7, 0.0, RngStream(1))
        assert r.partition.blocks == (1,) * 7

    def test_infinite_duration(self):
        r = kingman_sample(7, math.inf, RngStream(1))
        assert r.partition.blocks == (7,)

    def test_first_merge_exponential_law(self):
        # P(n0 = 3 at t) = exp(-3t) for n = 3 (total rate k(k-1)/2 = 3)
        t, n_draws = 0.4, 30_000
        gen = RngStream(2).generator()
        none = sum(kingman_sample(3, t, gen).partition.n0 == 3 for _ in range(n_draws))
        z = z_score(none, n_draws, math.exp(-3 * t))
        assert abs(z) <= 3.5

    def test_first_merge_pair_uniformity(self):
        # distinct block sizes identify the merged pair by its sum
        from escapelab.coalescent import _merge_pair

        gen = RngStream(3).generator()
        counts = Counter()
        n_draws = 30_000
        for _ in range(n_draws):
            sizes = [1, 2, 4]
            _merge_pair(sizes, gen)
            merged = next(x for x in sizes if x in (3, 5, 6))
            counts[merged] += 1
        for pair_sum in (3, 5, 6):
            z = z_score(counts[pair_sum], n_draws, 1 / 3)
            assert abs(z) <= 3.5, counts

    def test_coupled_seed_monotone_in_duration(self):
        for seed in range(20):
            n0s = [kingman_sample(12, t, RngStream(9, seed)).partition.n0
                   for t in (0.05, 0.2, 0.8, 3.0, math.inf)]
            assert all(a >= b for a, b in zip(n0s, n0s[1:])), n0s


class TestTrackLineages:
    def _constant_path(self, mp, c, t_f, n_rec=2001):
        times = np.linspace(0, t_f, n_rec)
        states = np.tile([c, 0.1, 0.3], (n_rec, 1))
        tau = times / (mp.V * c)
        path = synthetic_path(mp, states, times=times)
        path.tau_v = tau
        path.tau_vstar = times / (mp.V * 0.1)
        return path

    def test_constant_rate_reduction(self):
        # partition law on v = c equals Kingman at t_f/(V c)
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, V=100.0)
        t_f, c, n = 40.0, 0.4, 8
        path = self._constant_path(mp, c, t_f)
        parts = [track_lineages(path, n, "wild", RngStream(31, i)) for i in range(4000)]
        gen = RngStream(77).generator()
        ref = [kingman_sample(n, t_f / (mp.V * c), gen).partition for _ in range(4000)]
        _, p = partition_two_sample_test(parts, ref)
        assert p >= 0.01

    def test_huge_population_keeps_singletons(self):
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, V=1e12)
        path = self._constant_path(mp, 0.4, 10.0)
        part = track_lineages(path, 2, "wild", RngStream(4))
        assert part.blocks == (1, 1)

    def test_fast_response_preserves_diversity(self):
        # integral -> 0 means singletons almost surely
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, V=1e9)
        path = self._constant_path(mp, 0.4, 5.0)
        parts = [track_lineages(path, 10, "wild", RngStream(41, i)) for i in range(300)]
        frac = sum(p.n0 == 10 for p in parts) / len(parts)
        assert frac > 0.99

    def test_absorbed_population_rejected(self):
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, V=100.0)
        path = self._constant_path(mp, 0.4, 10.0)
        path.absorbed_v = 5.0
        with pytest.raises(LineageError):
            track_lineages(path, 4, "wild", RngStream(5))

    def test_mutant_channel(self):
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, V=100.0)
        path = self._constant_path(mp, 0.4, 10.0)
        part = track_lineages(path, 6, "mutant", RngStream(6))
        assert sum(part.blocks) == 6

    def test_resolution_error_under_half_individual_floor(self):
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, V=100.0)
        times = np.linspace(0, 10, 101)
        states = np.tile([0.4, 0.1, 0.3], (101, 1))
        states[50, 0] = 0.001  # below 1/(2V) = 0.005 without absorbing
        path = synthetic_path(mp, states, times=times)
        path.absorb_floor = 0.5 / mp.V
        with pytest.raises(LineageError):
            track_lineages(path, 4, "wild", RngStream(7))


class TestBirthWeightedFactor:
    def test_values(self):
        mp = ModelParams(alpha=1, f=0.8, epsilon=0.05, k=1.0, kstar=1.0)
        assert birth_weighted_factor(mp, "wild") == 2.0
        assert birth_weighted_factor(mp, "mutant") == pytest.approx(1.8)


class TestPredictPartition:
    @pytest.fixture
    def mp(self):
        return ModelParams(alpha=1, f=0.8, kappa=1.0, V=1e9)

    def test_failed_row(self, mp):
        p = predict_partition(mp, OutcomeLabel.FAILED_MUTANT, 6, RngStream(1))
        assert p.blocks == (1,) * 6

    def test_wild_lost_row(self, mp):
        p = predict_partition(mp, OutcomeLabel.WILD_LOST, 6, RngStream(1))
        assert p.blocks == (6,)

    def test_mutant_lost_row_reproducible(self, mp):
        a = predict_partition(mp, OutcomeLabel.MUTANT_LOST_AFTER_RISE, 10, RngStream(2))
        b = predict_partition(mp, OutcomeLabel.MUTANT_LOST_AFTER_RISE, 10, RngStream(2))
        assert a == b and sum(a.blocks) == 10

    def test_coexistence_binomial_split(self, mp):
        # xi ~ Binomial(10, alpha(1-f)/f) wild samples; mutant side one block
        gen = RngStream(3).generator()
        n = 10
        largest = []
        for _ in range(600):
            part = predict_partition(mp, OutcomeLabel.COEXISTENCE, n, gen)
            assert sum(part.blocks) == n
            largest.append(max(part.blocks))
        # mutant block has mean size n(1 - 0.25) = 7.5; dominant most draws
        assert np.mean(largest) > 6.0
