import itertools
import random
from collections import Counter, deque

import pytest
from hypothesis import given, strategies as st

from demsim.domain import AccessCategory as AC, ConfigError
from demsim.traffic import (
    BetaDistribution,
    build_beta_distribution,
    refill_saturated,
    sample_destination,
)


def test_build_known_splits():
    assert build_beta_distribution(2, 0.5).weights == (0.5, 0.5)
    w3 = build_beta_distribution(3, 1.0 / 3.0).weights
    assert w3 == pytest.approx((1 / 3, 1 / 3, 1 / 3))
    assert build_beta_distribution(1, 0.123).weights == (1.0,)


def test_negative_weight_is_error():
    with pytest.raises(ConfigError):
        build_beta_distribution(3, 0.9)   # third share would be negative
    with pytest.raises(ConfigError):
        build_beta_distribution(2, -0.2)


def test_out_of_range_beta_warns_but_builds():
    with pytest.warns(RuntimeWarning):
        d = build_beta_distribution(2, 0.02)
    assert d.weights == (0.02, 0.98)
    with pytest.warns(RuntimeWarning):
        build_beta_distribution(3, 0.4)


def test_in_range_beta_is_silent():
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        build_beta_distribution(2, 0.05)
        build_beta_distribution(2, 0.5)
        build_beta_distribution(3, 1.0 / 3.0)


def test_distribution_invariants():
    with pytest.raises(ConfigError):
        BetaDistribution((0.7, 0.2))      # does not sum to 1
    with pytest.raises(ConfigError):
        BetaDistribution((1.2, -0.2))


def test_unsupported_user_count():
    with pytest.raises(ConfigError):
        build_beta_distribution(4, 0.25)


def test_degenerate_sample_needs_no_rng():
    assert sample_destination(BetaDistribution((1.0,)), None) == 1


def test_sample_frequencies_match_weights():
    # Law-of-large-numbers oracle for the categorical sampler.
    rng = random.Random(1)
    dist = build_beta_distribution(2, 0.5)
    n = 10**6
    counts = Counter(sample_destination(dist, rng) for _ in range(n))
    assert counts[1] / n == pytest.approx(0.5, abs=2e-3)
    assert counts[2] / n == pytest.approx(0.5, abs=2e-3)


def test_sample_frequencies_skewed_split():
    rng = random.Random(2)
    dist = build_beta_distribution(2, 0.05)  # boundary value, still legal
    n = 10**6
    freq1 = sum(1 for _ in range(n) if sample_destination(dist, rng) == 1) / n
    assert freq1 == pytest.approx(0.05, abs=1e-3)


@given(st.integers(min_value=0, max_value=2**32))
def test_sample_stays_in_range(seed):
    rng = random.Random(seed)
    dist = build_beta_distribution(3, 0.2)
    assert sample_destination(dist, rng) in (1, 2, 3)


def test_refill_tops_up_and_is_idempotent():
    q = deque()
    ids = itertools.count()
    dist = build_beta_distribution(2, 0.5)
    rng = random.Random(3)
    refill_saturated(q, 4, AC.VO, dist, rng, ids)
    assert len(q) == 4
    assert [f.id for f in q] == [0, 1, 2, 3]
    assert all(f.ac is AC.VO and f.duration == 1 and f.dest in (1, 2) for f in q)
    before = list(q)
    refill_saturated(q, 4, AC.VO, dist, rng, ids)
    assert list(q) == before


def test_refill_fixed_destination():
    q = deque()
    refill_saturated(q, 3, AC.BE, None, None, itertools.count(10), dest=2)
    assert [f.dest for f in q] == [2, 2, 2]
    assert [f.id for f in q] == [10, 11, 12]
    assert all(f.ac is AC.BE for f in q)
