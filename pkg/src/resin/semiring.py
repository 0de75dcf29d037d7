"""Commutative semirings over which reactive circuits compute.

Only two instances ship: the probability semiring used for weighted model
counting and the max-times (Viterbi) semiring used for most-probable
explanations.  Circuits depend solely on :class:`Semiring`, so further
instances (gradients, expectations) plug in without touching circuit code.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Iterable


class UnsupportedNegationError(ValueError):
    """Raised when a literal complement is requested on a semiring without one."""


@dataclass(frozen=True)
class Semiring:
    """A commutative semiring ``(R, plus, times, zero, one)``.

    ``complement`` derives the weight of a negated literal from the weight of
    its positive literal; it is ``None`` when the semiring gives no such rule.
    """

    name: str
    plus: Callable[[Any, Any], Any]
    times: Callable[[Any, Any], Any]
    zero: Any
    one: Any
    complement: Callable[[Any], Any] | None = None
    # n-ary folds; must agree with a left fold of plus/times from zero/one
    fold_plus: Callable[[Iterable[Any]], Any] | None = None
    fold_times: Callable[[Iterable[Any]], Any] | None = None

    @property
    def has_negation_complement(self) -> bool:
        return self.complement is not None

    def sum(self, values: Iterable[Any]) -> Any:
        if self.fold_plus is not None:
            return self.fold_plus(values)
        return reduce(self.plus, values, self.zero)

    def prod(self, values: Iterable[Any]) -> Any:
        if self.fold_times is not None:
            return self.fold_times(values)
        return reduce(self.times, values, self.one)

    def __repr__(self) -> str:
        return f"Semiring({self.name})"


def _probability_complement(w: float) -> float:
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"probability weight {w!r} outside [0, 1]")
    return 1.0 - w


PROBABILITY = Semiring(
    name="probability",
    plus=operator.add,
    times=operator.mul,
    zero=0.0,
    one=1.0,
    complement=_probability_complement,
    fold_plus=lambda xs: sum(xs, 0.0),
    fold_times=lambda xs: math.prod(xs, start=1.0),
)

MAX_TIMES = Semiring(
    name="max-times",
    plus=max,
    times=operator.mul,
    zero=0.0,
    one=1.0,
    fold_plus=lambda xs: max(xs, default=0.0),
    fold_times=lambda xs: math.prod(xs, start=1.0),
)

SEMIRINGS = {sr.name: sr for sr in (PROBABILITY, MAX_TIMES)}


def get_semiring(name: str) -> Semiring:
    try:
        return SEMIRINGS[name]
    except KeyError:
        raise ValueError(f"unknown semiring {name!r}; choose from {sorted(SEMIRINGS)}") from None


def sr_plus(sr: Semiring, a: Any, b: Any) -> Any:
    return sr.plus(a, b)


def sr_times(sr: Semiring, a: Any, b: Any) -> Any:
    return sr.times(a, b)


def literal_weight(sr: Semiring, positive_weight: Any, negated: bool) -> Any:
    """Weight of a signed literal given the weight of its positive form."""
    if not negated:
        return positive_weight
    if sr.complement is None:
        raise UnsupportedNegationError(
            f"the {sr.name} semiring defines no complement for negated literals; "
            "supply the negative literal's weight explicitly"
        )
    return sr.complement(positive_weight)
