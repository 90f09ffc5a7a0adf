"""Statistical checks shared by the harness and the test suite."""

from __future__ import annotations

import math
from collections import Counter

import numpy as np
from scipy import stats as sps

__all__ = [
    "z_score",
    "freq_ci",
    "two_sample_ks",
    "partition_two_sample_test",
    "pooled_z",
]


def z_score(count: int, n: int, p0: float) -> float:
    """Normal z of an observed frequency against a hypothesized mass p0."""
    if n <= 0:
        return math.nan
    se = math.sqrt(p0 * (1.0 - p0) / n)
    if se == 0.0:
        return 0.0 if count / n == p0 else math.inf
    return (count / n - p0) / se


def pooled_z(count_a: int, n_a: int, count_b: int, n_b: int) -> float:
    """Two-sample z for a difference of frequencies under a pooled estimate."""
    p = (count_a + count_b) / (n_a + n_b)
    se = math.sqrt(p * (1 - p) * (1 / n_a + 1 / n_b))
    if se == 0.0:
        return 0.0
    return (count_a / n_a - count_b / n_b) / se


def freq_ci(count: int, n: int, level: float = 0.95) -> tuple[float, float]:
    """Normal-approximation confidence interval for a frequency."""
    if n == 0:
        return (math.nan, math.nan)
    z = sps.norm.ppf(0.5 + level / 2)
    p = count / n
    half = z * math.sqrt(max(p * (1 - p), 1e-12) / n)
    return (max(0.0, p - half), min(1.0, p + half))


def two_sample_ks(a, b) -> tuple[float, float]:
    """(statistic, p-value) of the two-sample Kolmogorov-Smirnov test."""
    res = sps.ks_2samp(np.asarray(a), np.asarray(b))
    return float(res.statistic), float(res.pvalue)


def partition_two_sample_test(parts_a, parts_b, min_expected: float = 5.0
                              ) -> tuple[float, float]:
    """Chi-square homogeneity test over canonical partition shapes.

    Partitions are binned by their sorted-block key; rare shapes are
    pooled (smallest first) until every pooled expected count reaches
    min_expected in both samples.  Returns (statistic, p-value).
    """
    keys_a = Counter(p.key() for p in parts_a)
    keys_b = Counter(p.key() for p in parts_b)
    n_a, n_b = sum(keys_a.values()), sum(keys_b.values())
    if n_a == 0 or n_b == 0:
        raise ValueError("empty partition sample")
    all_keys = sorted(set(keys_a) | set(keys_b),
                      key=lambda k: keys_a[k] + keys_b[k], reverse=True)
    cols_a, cols_b = [], []
    pool_a = pool_b = 0
    for k in all_keys:
        tot = keys_a[k] + keys_b[k]
        exp_a = tot * n_a / (n_a + n_b)
        exp_b = tot * n_b / (n_a + n_b)
        if exp_a >= min_expected and exp_b >= min_expected:
            cols_a.append(keys_a[k])
            cols_b.append(keys_b[k])
        else:
            pool_a += keys_a[k]
            pool_b += keys_b[k]
    if pool_a + pool_b > 0:
        cols_a.append(pool_a)
        cols_b.append(pool_b)
    table = np.array([cols_a, cols_b])
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        # both samples concentrated on one shape: identical by construction
        return 0.0, 1.0
    chi2, p, _, _ = sps.chi2_contingency(table)
    return float(chi2), float(p)
