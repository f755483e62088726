import itertools

import numpy as np
import pytest

from quadmultipole import (ExplosionGuard, GenParcelling, count_parcellings,
                           enumerate_parcellings, kappa)

from oracles import double_factorial, merged_count, multigraph_count, perfect_matchings


@pytest.mark.parametrize("d", range(8))
def test_kappa(d):
    assert kappa(d) == double_factorial(2 * d - 1)


@pytest.mark.parametrize("d", range(1, 6))
def test_simple_points(d):
    mu = [1] * (2 * d)
    assert count_parcellings(mu) == kappa(d)
    if d <= 4:
        assert len(enumerate_parcellings(mu)) == len(list(perfect_matchings(range(2 * d))))


@pytest.mark.parametrize("mu", [(2, 1, 1), (2, 2), (3, 1), (3, 3, 2, 2, 1, 1), (4, 2, 2),
                                (2, 1, 1, 1, 1), (2, 2, 1, 1, 1, 1), (5, 3)])
def test_counts_match_bruteforce(mu):
    got = enumerate_parcellings(mu)
    assert len(got) == count_parcellings(mu) == multigraph_count(mu)
    assert len({p.encode() for p in got}) == len(got)
    assert all(p.is_valid_for(mu) for p in got)
    assert [p.encode() for p in got] == sorted(p.encode() for p in got)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_merge_counts(d):
    mu = [2] + [1] * (2 * d - 2)
    assert count_parcellings(mu) == merged_count(d)
    assert merged_count(d) == (kappa(d) + kappa(d - 1)) // 2


def test_examples():
    assert count_parcellings([1, 1, 1, 1]) == 3
    assert count_parcellings([2, 1, 1]) == 2
    assert count_parcellings([2, 2]) == 2
    p = GenParcelling.from_pairs([(1, 0), (2, 3)], 4)
    assert p.pairs == ((0, 1), (2, 3))
    assert p.multiplicities() == [1, 1, 1, 1]


def test_guards():
    with pytest.raises(ExplosionGuard):
        enumerate_parcellings([1] * 26)
    with pytest.raises(ValueError):
        count_parcellings([1, 1, 1])
    with pytest.raises(ValueError):
        count_parcellings([0, 2])
