"""Train/validation/test partition of the series."""

from __future__ import annotations

import math

import numpy as np

from arnlab.data.dataset import Dataset, SplitDataset
from arnlab.errors import DataError

MIN_SERIES = 4


def split_sizes(n: int) -> tuple[int, int, int]:
    """50/25/25 rule: ceil(n/2), ceil(n/4) and the remainder."""
    n_train = math.ceil(n / 2)
    n_val = math.ceil(n / 4)
    return n_train, n_val, n - n_train - n_val


def split(dataset: Dataset, seed: int) -> SplitDataset:
    """Shuffle the series with ``seed`` and partition them.

    Raises:
        DataError: fewer than four series, or any split would be empty
    """
    n = dataset.n_series
    if n < MIN_SERIES:
        raise DataError(f"need at least {MIN_SERIES} series to split, got {n}")
    n_train, n_val, n_test = split_sizes(n)
    if min(n_train, n_val, n_test) == 0:
        raise DataError(f"{n} series give an empty split ({n_train}/{n_val}/{n_test})")
    order = np.random.default_rng(seed).permutation(n)
    return SplitDataset(
        train=dataset.subset(order[:n_train]),
        validation=dataset.subset(order[n_train : n_train + n_val]),
        test=dataset.subset(order[n_train + n_val :], use_once=True),
    )
