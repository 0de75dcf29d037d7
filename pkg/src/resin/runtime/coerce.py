"""Turning typed signal values into circuit weights."""

from __future__ import annotations

from statistics import NormalDist

from resin.grounder import GroundSite
from resin.runtime.values import Boolean, Density, Number, Probability, TypedValue

_COMPARE = {
    ">": lambda x, c: x > c,
    ">=": lambda x, c: x >= c,
    "<": lambda x, c: x < c,
    "<=": lambda x, c: x <= c,
    "==": lambda x, c: x == c,
}


class CoercionError(TypeError):
    pass


def coerce(
    value: TypedValue,
    site: GroundSite | None = None,
    threshold: float | None = None,
    halfwidth: float = 1e-3,
) -> float:
    """Weight in [0, 1] for ``value``.

    Plain sources map Probability to itself and Boolean to 1/0.  At a
    comparison site, a Number is thresholded and a Density contributes the
    Gaussian mass on the satisfying side; ``==`` integrates over
    ``[c - halfwidth, c + halfwidth]``.  ``threshold`` overrides the site's
    constant when the right-hand side is itself a Number signal.
    """
    if site is None:
        if isinstance(value, Probability):
            return float(value.value)
        if isinstance(value, Boolean):
            return 1.0 if value.value else 0.0
        raise CoercionError(f"{value.type_name} values need a comparison to become a weight")

    c = threshold if threshold is not None else site.rhs
    if isinstance(c, str):
        raise CoercionError(f"comparison {site.name} needs the current value of {c}")
    if isinstance(value, Number):
        return 1.0 if _COMPARE[site.op](value.value, c) else 0.0
    if isinstance(value, Density):
        dist = NormalDist(value.mean, value.stddev)
        if site.op in (">", ">="):
            # upper tail via symmetry keeps precision far from the mean
            return dist.cdf(2 * value.mean - c)
        if site.op in ("<", "<="):
            return dist.cdf(c)
        return dist.cdf(c + halfwidth) - dist.cdf(c - halfwidth)
    raise CoercionError(f"{value.type_name} values cannot be compared in {site.name}")
