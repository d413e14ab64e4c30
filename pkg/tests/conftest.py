# Copyright (C) 2026 pybatmap developers
#
# SPDX-License-Identifier: GPL-3.0-only

# pylint: disable=missing-module-docstring
# pylint: disable=missing-class-docstring
# pylint: disable=missing-function-docstring

import numpy as np
import pytest

import pybatmap.mining
import pybatmap.params

__author__ = "pybatmap developers"
__copyright__ = "Copyright 2026 pybatmap developers"
__license__ = "GPLv3"


def random_db(
    n_items: int,
    n_transactions: int,
    seed: int,
    low: float = 0.005,
    high: float = 0.2,
) -> pybatmap.mining.TransactionDB:
    """Transactions where item ``i`` occurs with its own probability in
    [``low``, ``high``), so tidlist sizes differ by up to ``high / low``."""
    rng = np.random.default_rng(seed)
    probabilities = np.exp(rng.uniform(np.log(low), np.log(high), n_items))
    matrix = rng.random((n_transactions, n_items)) < probabilities
    return pybatmap.mining.TransactionDB(
        [np.flatnonzero(row) for row in matrix], n_items
    )


def random_set(size: int, universe: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(universe, size=size, replace=False)).astype(np.int64)


@pytest.fixture
def db_factory():
    return random_db


@pytest.fixture
def small_db():
    return random_db(48, 600, seed=7, low=0.01, high=0.3)


@pytest.fixture
def params():
    return pybatmap.params.derive_params(49_999, 42)


@pytest.fixture
def perms(params):  # pylint: disable=redefined-outer-name
    return params.permutations()


@pytest.fixture
def small_collection(small_db):  # pylint: disable=redefined-outer-name
    vertical = pybatmap.mining.build_vertical(small_db)
    collection, _ = pybatmap.mining.build_collection(vertical, seed=3, r_min=16)
    return collection
