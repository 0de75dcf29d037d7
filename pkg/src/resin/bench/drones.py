"""Planar drone traffic: parked dwell phases alternating with straight journeys.

Drones sit on landing pads laid out on a grid.  After a random dwell a drone
flies at constant speed to a free pad.  Every tick each drone reports a
Gaussian position estimate (exact and tight while parked, noisy while
flying) and every pair's distance is published as a Density whose stddev
combines both drones' positional noise.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from itertools import combinations

from resin.bench.runner import Trace
from resin.runtime.values import BusMessage, Density


@dataclass(frozen=True)
class DroneScenario:
    n_drones: int = 5
    seed: int = 0
    duration: float = 60.0
    tick_hz: float = 10.0
    speed: tuple[float, float] = (8.0, 15.0)
    dwell: tuple[float, float] = (20.0, 60.0)
    sigma_fly: float = 5.0
    sigma_parked: float = 0.5
    safety_radius: float = 25.0
    pad_spacing: float = 60.0
    extra_pads: int = 3

    def __post_init__(self) -> None:
        if self.n_drones < 2:
            raise ValueError("need at least two drones")
        if self.tick_hz <= 0 or self.duration <= 0:
            raise ValueError("tick rate and duration must be positive")
        if self.sigma_fly <= 0 or self.sigma_parked <= 0:
            raise ValueError("positional noise must be positive")

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(combinations(range(1, self.n_drones + 1), 2))


def channel(i: int, j: int) -> str:
    return f"/drone{i}_drone{j}"


def drone_program(n_drones: int, radius: float = 25.0, target: str = "/safety") -> str:
    lines = ["# Estimated pairwise distances"]
    for i, j in combinations(range(1, n_drones + 1), 2):
        lines.append(f'distance(drone_{i}, drone_{j}) <- source("{channel(i, j)}", Density).')
    lines += [
        "",
        f"# Unsafe as soon as any two drones come closer than {radius:g} meters",
        f"unsafe if distance(X, Y) < {radius!r}.",
        "",
        f'unsafe -> target("{target}").',
        "",
    ]
    return "\n".join(lines)


@dataclass
class Phase:
    time: float
    drone: int
    kind: str  # "depart" or "arrive"


@dataclass
class _Drone:
    pad: int
    pos: tuple[float, float]
    depart_at: float
    target: int | None = None
    velocity: tuple[float, float] = (0.0, 0.0)
    arrive_at: float = math.inf


def _pads(sc: DroneScenario) -> list[tuple[float, float]]:
    count = sc.n_drones + sc.extra_pads
    cols = math.ceil(math.sqrt(count))
    return [((k % cols) * sc.pad_spacing, (k // cols) * sc.pad_spacing) for k in range(count)]


def run_drone_scenario(sc: DroneScenario) -> tuple[Trace, list[Phase]]:
    """Pre-recorded distance messages for the whole scenario and its journey phases."""
    rng = random.Random(sc.seed)
    pads = _pads(sc)
    order = rng.sample(range(len(pads)), sc.n_drones)
    drones = [_Drone(p, pads[p], rng.uniform(0, sc.dwell[1])) for p in order]
    phases: list[Phase] = []
    messages: list[BusMessage] = []
    dt = 1.0 / sc.tick_hz
    steps = int(round(sc.duration * sc.tick_hz))
    for step in range(1, steps + 1):
        t = step * dt
        for idx, d in enumerate(drones, start=1):
            if d.target is None and t >= d.depart_at:
                taken = {o.pad for o in drones} | {o.target for o in drones if o.target is not None}
                free = [k for k in range(len(pads)) if k not in taken]
                d.target = rng.choice(free)
                goal = pads[d.target]
                dist = math.dist(d.pos, goal)
                v = rng.uniform(*sc.speed)
                d.velocity = ((goal[0] - d.pos[0]) / dist * v, (goal[1] - d.pos[1]) / dist * v)
                d.arrive_at = t + dist / v
                d.pad = -1
                phases.append(Phase(t, idx, "depart"))
            if d.target is not None:
                if t >= d.arrive_at:
                    d.pos = pads[d.target]
                    d.pad, d.target = d.target, None
                    d.depart_at = t + rng.uniform(*sc.dwell)
                    d.arrive_at = math.inf
                    phases.append(Phase(t, idx, "arrive"))
                else:
                    d.pos = (d.pos[0] + d.velocity[0] * dt, d.pos[1] + d.velocity[1] * dt)
        estimates = []
        for d in drones:
            if d.target is None:
                estimates.append((d.pos, sc.sigma_parked))
            else:
                noisy = (d.pos[0] + rng.gauss(0, sc.sigma_fly), d.pos[1] + rng.gauss(0, sc.sigma_fly))
                estimates.append((noisy, sc.sigma_fly))
        for i, j in sc.pairs:
            (pi, si), (pj, sj) = estimates[i - 1], estimates[j - 1]
            value = Density(math.dist(pi, pj), math.hypot(si, sj))
            messages.append(BusMessage(channel(i, j), value, t))
    return Trace(messages, sc.duration), phases
