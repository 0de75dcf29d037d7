"""Frequency of Change: change predicates, Kalman rate tracking and banding.

Each signal keeps a :class:`FocTracker`.  Coerced weights pass through a
threshold predicate; the time between accepted (meaningful) updates is fed to
a constant-velocity Kalman filter whose state is ``(dt, dt_rate)``.  The rate
estimate is the reciprocal of the filtered inter-arrival time, and rates are
binned into bands of width ``h`` which decide the depth of a signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class KalmanConfig:
    delta_t: float = 1.0
    q: tuple[float, float] = (1e-4, 1e-4)
    r: float = 1e-2
    x0: tuple[float, float] = (1.0, 0.0)
    p0: tuple[float, float] = (1.0, 1.0)
    floor: float = 1e-4
    # innovation gate in standard deviations; a measurement outside it restarts
    # the filter at that measurement (None disables gating)
    gate: float | None = None

    def __post_init__(self) -> None:
        if self.r <= 0 or min(self.q) < 0 or min(self.p0) < 0 or self.floor <= 0:
            raise ConfigError("Kalman noise terms must be non-negative, R and the floor positive")
        if self.gate is not None and self.gate <= 0:
            raise ConfigError("Kalman gate must be positive")


@dataclass(frozen=True)
class ChangePredicate:
    epsilon: float = 1e-3

    def __call__(self, old: float | None, new: float) -> bool:
        return meaningful(self, old, new)


def meaningful(pred: ChangePredicate, old: float | None, new: float) -> bool:
    """First values always count; later ones only when they move by more than epsilon."""
    return old is None or abs(new - old) > pred.epsilon


class KalmanState:
    """Constant-velocity filter on inter-arrival time.

    Transition ``[[1, dt], [0, 1]]``, observation ``[1, 0]``; the covariance
    is stored as its three distinct entries so it stays exactly symmetric.
    """

    __slots__ = ("cfg", "x0", "x1", "p00", "p01", "p11", "observations")

    def __init__(self, cfg: KalmanConfig | None = None):
        self.cfg = cfg or KalmanConfig()
        self.x0, self.x1 = self.cfg.x0
        self.p00, self.p11 = self.cfg.p0
        self.p01 = 0.0
        self.observations = 0

    @property
    def x(self) -> tuple[float, float]:
        return (self.x0, self.x1)

    @property
    def P(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return ((self.p00, self.p01), (self.p01, self.p11))

    def observe(self, inter_arrival: float) -> bool:
        """One predict/update cycle; non-positive measurements are rejected."""
        if not inter_arrival > 0 or math.isinf(inter_arrival):
            return False
        cfg = self.cfg
        dt = cfg.delta_t
        # predict: x <- F x, P <- F P F^T + Q
        x0 = self.x0 + dt * self.x1
        x1 = self.x1
        p00 = self.p00 + 2 * dt * self.p01 + dt * dt * self.p11 + cfg.q[0]
        p01 = self.p01 + dt * self.p11
        p11 = self.p11 + cfg.q[1]
        # update with z = inter_arrival
        s = p00 + cfg.r
        y = inter_arrival - x0
        if cfg.gate is not None and y * y > cfg.gate * cfg.gate * s:
            self.x0, self.x1 = inter_arrival, 0.0
            self.p00, self.p11 = cfg.p0
            self.p01 = 0.0
            self.observations += 1
            return True
        k0, k1 = p00 / s, p01 / s
        self.x0 = x0 + k0 * y
        self.x1 = x1 + k1 * y
        self.p00 = p00 - k0 * p00
        self.p01 = p01 - k0 * p01
        self.p11 = p11 - k1 * p01
        self.observations += 1
        return True

    def interval(self) -> float:
        return max(self.x0, self.cfg.floor)


def kalman_observe(ks: KalmanState, inter_arrival: float) -> KalmanState:
    ks.observe(inter_arrival)
    return ks


def foc_estimate(ks: KalmanState) -> float | None:
    if ks.observations == 0:
        return None
    return 1.0 / ks.interval()


def partition(rate: float, h: float) -> int:
    if not h > 0:
        raise ConfigError(f"partition width must be positive, got {h}")
    if rate < 0:
        raise ValueError(f"negative rate {rate}")
    return math.floor(rate / h)


@dataclass
class FocTracker:
    """Change filtering and rate estimation for one signal."""

    predicate: ChangePredicate = field(default_factory=ChangePredicate)
    kalman: KalmanState = field(default_factory=KalmanState)
    last_weight: float | None = None
    last_time: float | None = None
    raw: int = 0
    accepted: int = 0

    def offer(self, weight: float, timestamp: float) -> bool:
        """Record a raw message; return whether it was a meaningful update."""
        self.raw += 1
        if not self.predicate(self.last_weight, weight):
            return False
        if self.last_time is not None:
            self.kalman.observe(timestamp - self.last_time)
        self.last_weight = weight
        self.last_time = timestamp
        self.accepted += 1
        return True

    def rate(self, now: float | None = None) -> float | None:
        """Estimated meaningful-update rate in Hz.

        With ``now`` given, time elapsed since the last update also bounds the
        interval from below, so a signal that went quiet decays towards 0 Hz
        instead of keeping its last filtered rate forever.
        """
        if self.kalman.observations == 0:
            return None
        interval = self.kalman.interval()
        if now is not None and self.last_time is not None:
            interval = max(interval, now - self.last_time)
        return 1.0 / interval
