"""Rate-tracking simulation for the Kalman FoC estimator.

A single signal fires at a rate redrawn from ``U(low, high)`` every
``segment`` events.  Arrivals are regular at the current rate, optionally
with exponential jitter mixed in, and the estimator sees each inter-arrival
time exactly once.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from resin.foc import KalmanConfig, KalmanState, foc_estimate, partition


@dataclass
class TrackingRun:
    true_rates: list[float]
    estimates: list[float]
    position: list[int]  # index of the event within its rate segment

    def in_band(self, h: float, settle: int = 10) -> float:
        """Fraction of settled estimates whose band matches the true band."""
        hits = total = 0
        for lam, est, pos in zip(self.true_rates, self.estimates, self.position):
            if pos < settle:
                continue
            total += 1
            hits += partition(est, h) == partition(lam, h)
        return hits / total if total else 1.0

    def mae(self, h: float) -> float:
        """Mean absolute band error over all events."""
        errs = [abs(partition(e, h) - partition(l, h)) for l, e in zip(self.true_rates, self.estimates)]
        return sum(errs) / len(errs)


def simulate_tracking(
    seed: int,
    n_events: int = 10_000,
    segment: int = 20,
    low: float = 0.0,
    high: float = 30.0,
    jitter: float = 0.0,
    cfg: KalmanConfig | None = None,
    min_rate: float = 1e-3,
) -> TrackingRun:
    rng = random.Random(seed)
    ks = KalmanState(cfg)
    true_rates, estimates, position = [], [], []
    rate = max(rng.uniform(low, high), min_rate)
    for n in range(n_events):
        if n and n % segment == 0:
            rate = max(rng.uniform(low, high), min_rate)
        gap = 1.0 / rate
        if jitter:
            gap = (1 - jitter) * gap + jitter * rng.expovariate(rate)
        ks.observe(gap)
        true_rates.append(rate)
        estimates.append(foc_estimate(ks))
        position.append(n % segment)
    return TrackingRun(true_rates, estimates, position)
