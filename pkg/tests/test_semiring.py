import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from resin.semiring import (
    MAX_TIMES,
    PROBABILITY,
    SEMIRINGS,
    UnsupportedNegationError,
    get_semiring,
    literal_weight,
    sr_plus,
    sr_times,
)

unit = st.floats(0.0, 1.0, allow_nan=False)
semirings = st.sampled_from(list(SEMIRINGS.values()))


def close(a, b):
    return math.isclose(a, b, rel_tol=1e-12, abs_tol=1e-15)


def test_plus_examples():
    assert sr_plus(PROBABILITY, 0.16, 0.04) == pytest.approx(0.20, abs=1e-15)
    assert sr_plus(PROBABILITY, 0.37, PROBABILITY.zero) == 0.37
    assert sr_plus(MAX_TIMES, 0.3, 0.7) == 0.7


def test_times_examples():
    assert sr_times(PROBABILITY, 0.5, 0.4) == pytest.approx(0.2, abs=1e-15)
    assert sr_times(MAX_TIMES, 0.5, 0.5) == 0.25
    for sr in SEMIRINGS.values():
        assert sr_times(sr, 0.37, sr.one) == 0.37


def test_literal_weight_examples():
    assert literal_weight(PROBABILITY, 0.2, True) == pytest.approx(0.8)
    assert literal_weight(PROBABILITY, 1.0, True) == 0.0
    assert literal_weight(PROBABILITY, 0.7, False) == 0.7
    assert literal_weight(MAX_TIMES, 0.7, False) == 0.7


def test_max_times_has_no_complement():
    assert not MAX_TIMES.has_negation_complement
    with pytest.raises(UnsupportedNegationError):
        literal_weight(MAX_TIMES, 0.3, True)


def test_probability_complement_rejects_out_of_range():
    with pytest.raises(ValueError):
        literal_weight(PROBABILITY, 1.5, True)


def test_get_semiring():
    assert get_semiring("probability") is PROBABILITY
    assert get_semiring("max-times") is MAX_TIMES
    with pytest.raises(ValueError):
        get_semiring("tropical")


@given(semirings, unit, unit, unit)
def test_laws(sr, a, b, c):
    p, t = sr.plus, sr.times
    assert close(p(a, b), p(b, a))
    assert close(t(a, b), t(b, a))
    assert close(p(p(a, b), c), p(a, p(b, c)))
    assert close(t(t(a, b), c), t(a, t(b, c)))
    assert close(t(a, p(b, c)), p(t(a, b), t(a, c)))
    assert p(a, sr.zero) == a
    assert t(a, sr.one) == a


@given(semirings, st.lists(unit, max_size=8))
def test_folds_match_binary_operations(sr, xs):
    left_plus = sr.zero
    left_times = sr.one
    for x in xs:
        left_plus = sr.plus(left_plus, x)
        left_times = sr.times(left_times, x)
    assert close(sr.sum(xs), left_plus)
    assert close(sr.prod(xs), left_times)


@given(unit)
def test_complement_sums_to_one(w):
    assert abs(literal_weight(PROBABILITY, w, True) + w - 1.0) <= 1e-15
