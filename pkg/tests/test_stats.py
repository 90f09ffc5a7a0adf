import numpy as np
import pytest

from escapelab import RngStream
from escapelab.coalescent import kingman_sample
from escapelab.stats import (
    freq_ci,
    partition_two_sample_test,
    pooled_z,
    two_sample_ks,
    z_score,
)


def test_z_score_basics():
    assert z_score(50, 100, 0.5) == 0.0
    assert z_score(60, 100, 0.5) == pytest.approx(2.0)


def test_pooled_z_symmetry():
    assert pooled_z(30, 100, 30, 100) == 0.0
    assert pooled_z(40, 100, 20, 100) == -pooled_z(20, 100, 40, 100)


def test_freq_ci_covers_point():
    lo, hi = freq_ci(50, 100)
    assert lo < 0.5 < hi
    assert freq_ci(0, 0) == (pytest.approx(float("nan"), nan_ok=True),) * 2


def test_ks_same_distribution():
    gen = RngStream(1).generator()
    _, p = two_sample_ks(gen.normal(size=2000), gen.normal(size=2000))
    assert p > 0.01


def test_partition_test_same_distribution():
    g1, g2 = RngStream(2).generator(), RngStream(3).generator()
    a = [kingman_sample(8, 0.3, g1).partition for _ in range(1500)]
    b = [kingman_sample(8, 0.3, g2).partition for _ in range(1500)]
    _, p = partition_two_sample_test(a, b)
    assert p >= 0.01


def test_partition_test_detects_difference():
    g1, g2 = RngStream(4).generator(), RngStream(5).generator()
    a = [kingman_sample(8, 0.15, g1).partition for _ in range(1500)]
    b = [kingman_sample(8, 0.6, g2).partition for _ in range(1500)]
    _, p = partition_two_sample_test(a, b)
    assert p < 0.001
