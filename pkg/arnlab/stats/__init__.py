"""Paired statistical comparison of models."""

from arnlab.stats.compare import ComparisonRow, compare
from arnlab.stats.significance import SignificanceResult, mcnemar, wilcoxon_signed_rank

__all__ = ["ComparisonRow", "SignificanceResult", "compare", "mcnemar", "wilcoxon_signed_rank"]
