"""Paired significance tests: McNemar and Wilcoxon signed-rank."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import chi2, norm, rankdata

EXACT_MAX_N = 25


@dataclass(frozen=True)
class SignificanceResult:
    statistic: float
    p_value: float


def mcnemar(b: int, c: int) -> SignificanceResult:
    """Continuity-corrected McNemar test on the discordant counts.

    ``b`` counts examples model A got right and B wrong, ``c`` the converse.
    """
    if b < 0 or c < 0:
        raise ValueError("discordant counts must be non-negative")
    if b + c == 0:
        return SignificanceResult(0.0, 1.0)
    stat = max((abs(b - c) - 1.0) ** 2 / (b + c), 0.0)
    return SignificanceResult(stat, float(chi2.sf(stat, df=1)))


def _exact_p(doubled_ranks: np.ndarray, w: int) -> float:
    """Two-sided p: 2 * P(W <= w) under random signs, counted by subset sums.

    Ranks are doubled so average ranks of ties become integers.
    """
    total = int(doubled_ranks.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled_ranks.astype(int):
        counts[r:] = counts[r:] + counts[: total + 1 - r].copy()
    p = counts[: w + 1].sum() / 2.0 ** len(doubled_ranks)
    return min(1.0, 2.0 * p)


def wilcoxon_signed_rank(diffs: Sequence[float]) -> SignificanceResult:
    """Two-sided Wilcoxon signed-rank test of paired differences.

    Zeros are dropped and ties get average ranks.  Up to 25 non-zero
    differences the p-value is exact; beyond that a normal approximation
    with tie and continuity corrections is used.  The statistic is
    min(W+, W-).
    """
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        return SignificanceResult(0.0, 1.0)
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)

    if n <= EXACT_MAX_N:
        return SignificanceResult(w, _exact_p(2 * ranks, int(round(2 * w))))

    mean = n * (n + 1) / 4.0
    _, tie_counts = np.unique(np.abs(d), return_counts=True)
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - float((tie_counts**3 - tie_counts).sum()) / 48.0
    if variance <= 0:
        return SignificanceResult(w, 1.0)
    z = max(abs(w - mean) - 0.5, 0.0) / math.sqrt(variance)
    return SignificanceResult(w, float(min(1.0, 2.0 * norm.sf(z))))
