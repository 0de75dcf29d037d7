"""Synthetic weighted-model-counting workloads with non-stationary Poisson traffic."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from resin.bench.runner import Trace
from resin.grounder import WmcPolynomial
from resin.literal import Literal
from resin.runtime.values import BusMessage, Probability


@dataclass(frozen=True)
class SyntheticWorkload:
    n_signals: int = 100
    models: int = 1000
    sources_per_model: int = 20
    seed: int = 0
    duration: float = 60.0
    rate_low: float = 0.0
    rate_high: float = 30.0
    # a signal's rate is redrawn after this many of its events
    segment_events: int = 20
    # fixed per-signal rates (Hz) replace the random schedule when given
    rates: dict[str, float] | None = field(default=None, hash=False)
    # explicit atom names; defaults to s0, s1, ...
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.n_signals < 1 or self.models < 0 or self.sources_per_model < 1:
            raise ValueError("need at least one signal and one source per model")
        if self.sources_per_model > self.n_signals:
            raise ValueError("sources_per_model cannot exceed n_signals")
        if not 0 <= self.rate_low <= self.rate_high or self.rate_high <= 0:
            raise ValueError("rate bounds must satisfy 0 <= low <= high, high > 0")
        if self.names is not None and len(set(self.names)) != self.n_signals:
            raise ValueError("names must hold n_signals distinct atoms")
        if self.segment_events < 1 or self.duration <= 0:
            raise ValueError("segment_events and duration must be positive")

    @property
    def atoms(self) -> tuple[str, ...]:
        if self.names is not None:
            return self.names
        width = len(str(self.n_signals - 1))
        return tuple(f"s{i:0{width}d}" for i in range(self.n_signals))


def gen_polynomial(w: SyntheticWorkload, rng: random.Random) -> WmcPolynomial:
    atoms = w.atoms
    terms = []
    for _ in range(w.models):
        chosen = sorted(rng.sample(range(w.n_signals), w.sources_per_model))
        terms.append(tuple(Literal(atoms[i], rng.random() < 0.5) for i in chosen))
    return WmcPolynomial(atoms, tuple(terms))


def poisson_events(
    rng: random.Random,
    duration: float,
    draw_rate,
    rate_high: float,
    segment_events: int,
) -> tuple[list[float], list[tuple[float, float]]]:
    """Event times of a piecewise-constant Poisson process by thinning.

    ``draw_rate()`` supplies a fresh rate at the start and after every
    ``segment_events`` accepted events.
    """
    times: list[float] = []
    rate = draw_rate()
    schedule = [(0.0, rate)]
    t = 0.0
    while True:
        t += rng.expovariate(rate_high)
        if t >= duration:
            return times, schedule
        if rng.random() * rate_high < rate:
            times.append(t)
            if len(times) % segment_events == 0:
                rate = draw_rate()
                schedule.append((t, rate))


def gen_synthetic(w: SyntheticWorkload) -> tuple[WmcPolynomial, Trace]:
    """Deterministic polynomial and message trace for ``w``."""
    rng = random.Random(w.seed)
    poly = gen_polynomial(w, rng)
    events: list[tuple[float, int, str, float]] = []
    schedule: dict[str, list[tuple[float, float]]] = {}
    for idx, atom in enumerate(poly.atoms):
        sub = random.Random(f"{w.seed}:{atom}")
        if w.rates is not None:
            rate = float(w.rates.get(atom, 0.0))
            if rate <= 0:
                schedule[f"/{atom}"] = [(0.0, 0.0)]
                continue
            times, steps = poisson_events(sub, w.duration, lambda: rate, rate, w.segment_events)
        else:
            times, steps = poisson_events(
                sub, w.duration, lambda: sub.uniform(w.rate_low, w.rate_high), w.rate_high, w.segment_events
            )
        schedule[f"/{atom}"] = steps
        for t in times:
            events.append((t, idx, atom, round(sub.random(), 9)))
    events.sort()
    messages = [BusMessage(f"/{atom}", Probability(v), t) for t, _, atom, v in events]
    return poly, Trace(messages, w.duration, schedule)


def worked_example() -> WmcPolynomial:
    """The two-model polynomial over a, b, c used throughout the docs."""
    a, b, c = (Literal(x) for x in "abc")
    return WmcPolynomial(("a", "b", "c"), ((a, b, -c), (-a, b, c)))


def worked_example_trace(duration: float = 100.0, seed: int = 0, rates=None) -> Trace:
    rates = rates or {"a": 5.0, "b": 1.0, "c": 1.0}
    w = SyntheticWorkload(
        n_signals=3, models=0, sources_per_model=1, seed=seed, duration=duration, rates=rates, names=("a", "b", "c")
    )
    return gen_synthetic(w)[1]


@dataclass
class SweepPoint:
    h: float
    memo_nodes: int
    layers: int
    moves: int
    omega: int


def oracle_rates(w: SyntheticWorkload) -> dict[str, float]:
    """One fixed rate per signal drawn from the workload's rate bounds."""
    rng = random.Random(f"{w.seed}:rates")
    return {a: rng.uniform(w.rate_low, w.rate_high) for a in w.atoms}


def plasticity_sweep(
    w: SyntheticWorkload,
    hs=(30.0, 10.0, 5.0, 1.0),
    rates: dict[str, float] | None = None,
    max_rounds: int = 100,
) -> list[SweepPoint]:
    """Structure reached for each partition width under known signal rates."""
    from resin.runtime.config import EngineConfig
    from resin.runtime.engine import polynomial_engine

    rng = random.Random(w.seed)
    poly = gen_polynomial(w, rng)
    rates = rates if rates is not None else oracle_rates(w)
    points = []
    for h in hs:
        cfg = EngineConfig(h=h, epsilon=0.0, hysteresis=1, max_band=None)
        engine = polynomial_engine(poly, cfg, mode="reactive")
        engine.oracle_rates = rates
        for i, atom in enumerate(poly.atoms):
            engine.step(BusMessage(f"/{atom}", Probability(rng.random()), 0.0))
        for _ in range(max_rounds):
            if not engine.adapt(0.0):
                break
        rc = engine.rc
        points.append(SweepPoint(h, rc.memo_nodes, rc.layers, len(engine.moves), rc.Omega))
    return points
