"""Nonparametric location tests with exact small-sample branches.

Both tests use mid-ranks for ties.  Exact null distributions are computed by
dynamic programming over doubled ranks (mid-ranks are half-integers, so
doubling makes them integers); the count arrays stay below 2^53, keeping
float64 arithmetic exact.  Larger samples use the normal approximation with
tie correction and a 0.5 continuity correction.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import rankdata

EXACT_RANKSUM_MIN_N = 8  # exact branch when the smaller sample is this size or less
EXACT_RANKSUM_TOTAL = 200  # and the combined sample fits the DP table
EXACT_SIGNRANK_N = 12


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _two_sided(p_low: float, p_high: float) -> float:
    return min(1.0, 2.0 * min(p_low, p_high))


def _ranksum_distribution(doubled: np.ndarray, m: int) -> np.ndarray:
    """counts[s] of size-m subsets of ``doubled`` with doubled-rank-sum s."""
    total = int(doubled.sum())
    f = np.zeros((m + 1, total + 1))
    f[0, 0] = 1.0
    for i, r in enumerate(doubled):
        r = int(r)
        for j in range(min(m, i + 1), 0, -1):
            f[j, r:] += f[j - 1, : total + 1 - r]
    return f[m]


def rank_sum_test(x, y) -> tuple[float, float]:
    """Mann-Whitney U test, two-sided.

    Returns (U for x, p).  Exact enumeration over rank assignments runs when
    the smaller sample has at most 8 members (and the combined sample is
    desk-sized); otherwise the tie-corrected normal approximation with
    continuity correction applies.
    """
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    n1, n2 = x.size, y.size
    if n1 == 0 or n2 == 0:
        raise ValueError("empty sample")
    combined = np.concatenate([x, y])
    ranks = rankdata(combined)
    r_x = float(ranks[:n1].sum())
    u_x = r_x - n1 * (n1 + 1) / 2.0
    n = n1 + n2

    if min(n1, n2) <= EXACT_RANKSUM_MIN_N and n <= EXACT_RANKSUM_TOTAL:
        # distribution of the smaller sample's rank sum over all subsets
        m = min(n1, n2)
        r_small = r_x if n1 <= n2 else float(ranks[n1:].sum())
        doubled = np.rint(2 * ranks).astype(np.int64)
        counts = _ranksum_distribution(doubled, m)
        total = counts.sum()
        s_obs = int(round(2 * r_small))
        p_low = counts[: s_obs + 1].sum() / total
        p_high = counts[s_obs:].sum() / total
        return u_x, _two_sided(float(p_low), float(p_high))

    mu = n1 * n2 / 2.0
    _, tie_counts = np.unique(combined, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0.0:
        return u_x, 1.0
    z = (abs(u_x - mu) - 0.5) / math.sqrt(var)
    return u_x, min(1.0, 2.0 * _normal_sf(max(z, 0.0)))


def _signrank_distribution(doubled: np.ndarray) -> np.ndarray:
    """counts[s] of sign patterns whose positive doubled-rank-sum is s."""
    total = int(doubled.sum())
    f = np.zeros(total + 1)
    f[0] = 1.0
    for r in doubled:
        r = int(r)
        g = f.copy()
        g[r:] += f[: total + 1 - r]
        f = g
    return f


def sign_rank_test(x, mu0: float = 0.0) -> tuple[float, float]:
    """Wilcoxon signed-rank test of symmetry about ``mu0``, two-sided.

    Zero differences are dropped; tied magnitudes get mid-ranks.  Exact for
    12 or fewer nonzero differences, normal approximation with tie and
    continuity corrections otherwise.  Returns (W+ statistic, p).
    """
    d = np.asarray(x, dtype=float).ravel() - mu0
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        return 0.0, 1.0
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())

    if n <= EXACT_SIGNRANK_N:
        doubled = np.rint(2 * ranks).astype(np.int64)
        counts = _signrank_distribution(doubled)
        total = counts.sum()
        s_obs = int(round(2 * w_plus))
        p_low = counts[: s_obs + 1].sum() / total
        p_high = counts[s_obs:].sum() / total
        return w_plus, _two_sided(float(p_low), float(p_high))

    mu = n * (n + 1) / 4.0
    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts))
    var = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term / 48.0
    if var <= 0.0:
        return w_plus, 1.0
    z = (abs(w_plus - mu) - 0.5) / math.sqrt(var)
    return w_plus, min(1.0, 2.0 * _normal_sf(max(z, 0.0)))
