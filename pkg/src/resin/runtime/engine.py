"""Per-target engine: coercion, change filtering, evaluation and adaptation.

An :class:`Engine` owns one compiled target.  Messages arrive one at a time
through :meth:`Engine.step`; everything that mutates the circuit or the rate
trackers happens there, so an engine needs no locking as long as a single
consumer feeds it.  Three evaluation modes share the same pipeline:

``flat``      full re-evaluation of the unadapted circuit per update
``adapted``   full re-evaluation of the continually adapted circuit
``reactive``  adapted circuit, re-evaluating only invalidated formulas
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Iterable

from resin.circuit import InvariantError, ReactiveCircuit
from resin.foc import ChangePredicate, FocTracker, KalmanState, partition
from resin.grounder import (
    GroundProgram,
    GroundSource,
    WmcPolynomial,
    build_wmc_polynomial,
    enumerate_stable_models,
    ground,
)
from resin.lang import load_program
from resin.runtime.bus import Bus, Subscription
from resin.runtime.coerce import CoercionError, coerce
from resin.runtime.config import EngineConfig
from resin.runtime.values import BusMessage, Number, Probability, TypedValue
from resin.semiring import get_semiring

log = logging.getLogger(__name__)

MODES = ("flat", "adapted", "reactive")


@dataclass(frozen=True)
class Move:
    time: float
    op: str
    atoms: tuple[str, ...]


@dataclass
class StepResult:
    value: float | None
    ops: int
    meaningful: bool


@dataclass
class _Pending:
    target: int
    count: int = 0


@dataclass
class EngineStats:
    messages: int = 0
    updates: int = 0
    publications: int = 0
    ops: int = 0
    errors: list[str] = field(default_factory=list)


class Engine:
    def __init__(
        self,
        gp: GroundProgram,
        config: EngineConfig | None = None,
        mode: str = "reactive",
        bus: Bus | None = None,
        poly: WmcPolynomial | None = None,
    ):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; choose from {', '.join(MODES)}")
        self.gp = gp
        self.config = config or EngineConfig()
        self.mode = mode
        self.bus = bus
        self.sr = get_semiring(self.config.semiring)
        if poly is None:
            self.models = enumerate_stable_models(gp, self.config.max_sources)
            poly = build_wmc_polynomial(self.models, gp.source_names)
        self.poly = poly
        self.rc = ReactiveCircuit.from_polynomial(self.poly, self.sr)

        self.sources: dict[str, GroundSource] = {s.name: s for s in gp.sources}
        self.by_channel: dict[str, list[GroundSource]] = {}
        self.channel_types: dict[str, str] = {}
        for src in gp.sources:
            for i, ch in enumerate(src.channels):
                self.by_channel.setdefault(ch, []).append(src)
                # the second channel of a comparison is a Number threshold signal
                self.channel_types[ch] = src.dtype if i == 0 else "Number"
        self.latest: dict[str, TypedValue] = {}
        self.trackers: dict[str, FocTracker] = {
            name: FocTracker(ChangePredicate(self.config.epsilon), KalmanState(self.config.kalman))
            for name in self.sources
        }
        self._weighted: set[str] = set()
        self._pending: dict[str, _Pending] = {}
        self.moves: list[Move] = []
        self._last_adapt = float("-inf")
        self.stats = EngineStats()
        self.last_value: float | None = None
        self.now = 0.0
        # when set, adaptation uses these rates (Hz) instead of the estimates
        self.oracle_rates: dict[str, float] | None = None
        if bus is not None:
            for ch, dtype in self.channel_types.items():
                bus.declare(ch, dtype)
            bus.declare(gp.target_channel, "Probability")

    # -- inputs ----------------------------------------------------------------

    @property
    def channels(self) -> list[str]:
        return list(self.by_channel)

    @property
    def ready(self) -> bool:
        """Every relevant source has delivered a value."""
        return len(self._weighted) == len(self.sources)

    def _weight(self, src: GroundSource) -> float | None:
        values = [self.latest.get(ch) for ch in src.channels]
        if any(v is None for v in values):
            return None
        if src.site is None:
            return coerce(values[0])
        threshold = None
        if len(values) > 1:
            rhs = values[1]
            if not isinstance(rhs, Number):
                raise CoercionError(f"threshold of {src.name} must be a Number, got {rhs.type_name}")
            threshold = rhs.value
        return coerce(values[0], src.site, threshold, self.config.equality_halfwidth)

    def step(self, msg: BusMessage) -> StepResult:
        """Process one message; returns the published value, if any."""
        self.stats.messages += 1
        self.now = max(self.now, msg.timestamp)
        affected = self.by_channel.get(msg.channel)
        if not affected:
            return StepResult(None, 0, False)
        expected = self.channel_types[msg.channel]
        if msg.value.type_name != expected:
            return self._skip(f"{msg.channel}: expected {expected}, got {msg.value.type_name}")
        previous = self.latest.get(msg.channel)
        self.latest[msg.channel] = msg.value
        changed: list[tuple[str, float]] = []
        try:
            weights = [(src.name, self._weight(src)) for src in affected]
        except (CoercionError, ValueError) as exc:
            if previous is None:
                del self.latest[msg.channel]
            else:
                self.latest[msg.channel] = previous
            return self._skip(f"{msg.channel}: {exc}")
        for name, weight in weights:
            if weight is not None and self.trackers[name].offer(weight, msg.timestamp):
                changed.append((name, weight))
        if not changed:
            return StepResult(None, 0, False)

        self.stats.updates += 1
        for name, weight in changed:
            self.rc.set_signal(name, weight)
            self._weighted.add(name)
            if self.mode == "reactive":
                self.rc.invalidate(name)
        if not self.ready:
            return StepResult(None, 0, True)

        if self.mode == "reactive":
            value, ops = self.rc.react()
        else:
            value, ops = self.rc.evaluate_full(), self.rc.Omega
        self.stats.ops += ops
        if self.mode != "flat" and msg.timestamp - self._last_adapt >= self.config.adapt_interval:
            self.adapt(msg.timestamp)
        self.last_value = value
        self._publish(value, msg.timestamp)
        return StepResult(value, ops, True)

    def _skip(self, message: str) -> StepResult:
        self.stats.errors.append(message)
        log.warning("skipped message: %s", message)
        return StepResult(None, 0, False)

    def _publish(self, value: float, timestamp: float) -> None:
        self.stats.publications += 1
        if self.bus is None:
            return
        # rounding can push a sum of products marginally past 1
        clipped = min(max(float(value), 0.0), 1.0)
        self.bus.publish(self.gp.target_channel, Probability(clipped), timestamp)

    # -- adaptation ------------------------------------------------------------

    def rates(self, now: float | None = None) -> dict[str, float]:
        if self.oracle_rates is not None:
            return {name: float(self.oracle_rates.get(name, 0.0)) for name in self.trackers}
        now = self.now if now is None else now
        return {name: t.rate(now) or 0.0 for name, t in self.trackers.items()}

    def bands(self, now: float | None = None) -> dict[str, int]:
        cap = self.config.max_band
        out = {}
        for name, lam in self.rates(now).items():
            k = partition(lam, self.config.h)
            out[name] = k if cap is None else min(k, cap)
        return out

    def target_depths(self, now: float | None = None) -> dict[str, int]:
        bands = self.bands(now)
        k_max = max(bands.values(), default=0)
        return {name: k_max - k for name, k in bands.items()}

    def adapt(self, now: float | None = None) -> list[Move]:
        """Move confirmed signals towards their target depth; returns the moves made."""
        if not self.ready or self.rc.value is None:
            return []
        self._last_adapt = self.now if now is None else now
        targets = self.target_depths(now)
        confirmed: dict[str, int] = {}
        for name, target in targets.items():
            depth = self.rc.signal_depth(name)
            if depth is None or depth == target:
                self._pending.pop(name, None)
                continue
            state = self._pending.get(name)
            if state is None or state.target != target:
                state = self._pending[name] = _Pending(target)
            state.count += 1
            if state.count >= self.config.hysteresis:
                confirmed[name] = target
        made: list[Move] = []
        rounds = self.rc.layers + max(confirmed.values(), default=0) + 1
        for _ in range(rounds):
            up = tuple(sorted(a for a, t in confirmed.items() if self.rc.signal_depth(a) > t))
            if up:
                made.append(self._move("lift", up, now))
            down = tuple(sorted(a for a, t in confirmed.items() if self.rc.signal_depth(a) < t))
            if down:
                made.append(self._move("drop", down, now))
            if not up and not down:
                break
        for name in confirmed:
            self._pending.pop(name, None)
        return made

    def poll(self, now: float) -> list[Move]:
        """Re-estimate rates at ``now`` without a message and adapt if needed."""
        self.now = max(self.now, now)
        if self.mode == "flat":
            return []
        return self.adapt(now)

    def _move(self, op: str, atoms: tuple[str, ...], now: float | None) -> Move:
        before = self.rc.value
        getattr(self.rc, op)(atoms)
        after = self.rc.value
        if abs(after - before) > 1e-12 * max(1.0, abs(before)):
            raise InvariantError(f"{op}{atoms} changed the root value from {before!r} to {after!r}")
        move = Move(self.now if now is None else now, op, atoms)
        self.moves.append(move)
        log.debug("%s %s at t=%.3f", op, ",".join(atoms), move.time)
        return move

    # -- driving ---------------------------------------------------------------

    def subscribe(self) -> Subscription:
        if self.bus is None:
            raise ValueError("engine has no bus")
        return self.bus.subscribe(self.channels, self.config.queue_bound)

    def run(self, sub: Subscription, stop: threading.Event) -> None:
        """Consume ``sub`` until ``stop`` is set."""
        while not stop.is_set():
            msg = sub.get(timeout=0.05)
            if msg is not None:
                self.step(msg)


def polynomial_engine(
    poly: WmcPolynomial,
    config: EngineConfig | None = None,
    mode: str = "reactive",
    bus: Bus | None = None,
    target_channel: str = "/target",
) -> Engine:
    """Engine over a ready-made polynomial whose atoms are Probability sources on ``/<atom>``."""
    sources = [GroundSource(a, "source", "Probability", (f"/{a}",)) for a in poly.atoms]
    gp = GroundProgram("target", target_channel, sources, [], {})
    return Engine(gp, config, mode, bus, poly)


def compile_engines(
    text: str,
    config: EngineConfig | None = None,
    mode: str = "reactive",
    bus: Bus | None = None,
) -> list[Engine]:
    """One engine per target of the program in ``text``."""
    typed = load_program(text)
    return [Engine(gp, config, mode, bus) for gp in ground(typed)]


class EngineThread(threading.Thread):
    def __init__(self, engine: Engine):
        super().__init__(daemon=True, name=f"engine:{engine.gp.target}")
        self.engine = engine
        self.stop_event = threading.Event()
        self.sub = engine.subscribe()

    def run(self) -> None:
        self.engine.run(self.sub, self.stop_event)

    def stop(self) -> None:
        self.stop_event.set()
        self.sub.close()


def start_engines(engines: Iterable[Engine]) -> list[EngineThread]:
    threads = [EngineThread(e) for e in engines]
    for t in threads:
        t.start()
    return threads


__all__ = [
    "MODES",
    "Engine",
    "EngineThread",
    "Move",
    "StepResult",
    "compile_engines",
    "polynomial_engine",
    "start_engines",
]
