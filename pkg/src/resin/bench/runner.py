"""Feeding one recorded trace through flat, adapted and reactive engines.

All modes see the identical message sequence.  Each engine is also polled
on a fixed simulated-time grid so that rates of signals that went quiet can
decay and trigger structural moves even when no message arrives.
"""

from __future__ import annotations

import bisect
import csv
import io
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

from resin.foc import partition
from resin.runtime.engine import MODES, Engine
from resin.runtime.values import BusMessage

CSV_HEADER = (
    "window_start_s",
    "mode",
    "cum_ops",
    "cum_wall_us",
    "memo_nodes",
    "layers",
    "partition_mae",
    "gain_counted",
)


@dataclass
class Trace:
    messages: list[BusMessage]
    duration: float
    # channel -> [(start time, rate in Hz)], when the generator knows the truth
    schedule: dict[str, list[tuple[float, float]]] = field(default_factory=dict)

    def rate_at(self, channel: str, t: float) -> float | None:
        steps = self.schedule.get(channel)
        if not steps:
            return None
        i = bisect.bisect_right([s for s, _ in steps], t) - 1
        return steps[max(i, 0)][1]


@dataclass
class ModeRun:
    mode: str
    ops: int = 0
    wall_us: int = 0
    evaluations: int = 0
    adapt_ops: int = 0
    moves: list = field(default_factory=list)
    rows: list[dict] = field(default_factory=list)
    values: dict[int, float] = field(default_factory=dict)
    memo_nodes: int = 1
    layers: int = 1


@dataclass
class BenchmarkResult:
    runs: dict[str, ModeRun]
    flat_omega: int
    max_mode_diff: float
    window: float

    def gain(self, mode: str) -> float:
        run = self.runs[mode]
        return _gain(run.evaluations * self.flat_omega, run.ops)

    def summary(self) -> dict:
        modes = {}
        for mode, run in self.runs.items():
            modes[mode] = {
                "ops": run.ops,
                "wall_us": run.wall_us,
                "evaluations": run.evaluations,
                "adapt_ops": run.adapt_ops,
                "moves": len(run.moves),
                "memo_nodes": run.memo_nodes,
                "layers": run.layers,
                "gain_counted": self.gain(mode),
            }
        wall = {m: r.wall_us for m, r in self.runs.items()}
        out = {
            "flat_omega": self.flat_omega,
            "window_s": self.window,
            "max_mode_diff": self.max_mode_diff,
            "modes": modes,
        }
        if "flat" in wall:
            out["gain_wall"] = {m: (wall["flat"] / w if w else None) for m, w in wall.items()}
        return out

    def rows(self) -> list[dict]:
        order = {m: i for i, m in enumerate(MODES)}
        rows = [r for run in self.runs.values() for r in run.rows]
        return sorted(rows, key=lambda r: (r["window_start_s"], order[r["mode"]]))

    def csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows():
            writer.writerow(
                [
                    f"{r['window_start_s']:.3f}",
                    r["mode"],
                    r["cum_ops"],
                    r["cum_wall_us"],
                    r["memo_nodes"],
                    r["layers"],
                    f"{r['partition_mae']:.6f}",
                    f"{r['gain_counted']:.6f}",
                ]
            )
        return buf.getvalue()

    def write(self, csv_path: str | None, json_path: str | None) -> None:
        if csv_path:
            with open(csv_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.csv())
        if json_path:
            with open(json_path, "w", encoding="utf-8") as fh:
                json.dump(self.summary(), fh, indent=2, sort_keys=True)
                fh.write("\n")


def _gain(flat_ops: float, ops: float) -> float:
    if ops == 0:
        return 1.0
    return flat_ops / ops


def partition_mae(engine: Engine, trace: Trace, t: float, window_counts: dict[str, int], window: float) -> float:
    """Mean absolute band error over the engine's signals at time ``t``.

    The true rate is the generator's schedule when known, otherwise the
    signal's meaningful-update count over the last window.
    """
    h = engine.config.h
    cap = engine.config.max_band
    errors = []
    for name, tracker in engine.trackers.items():
        lam_hat = tracker.rate(t) or 0.0
        src = engine.sources[name]
        truth = trace.rate_at(src.channels[0], t)
        if truth is None:
            truth = window_counts.get(name, 0) / window
        k_hat, k = partition(lam_hat, h), partition(truth, h)
        if cap is not None:
            k_hat, k = min(k_hat, cap), min(k, cap)
        errors.append(abs(k_hat - k))
    return sum(errors) / len(errors) if errors else 0.0


def run_mode(
    engine: Engine,
    trace: Trace,
    window: float = 1.0,
    poll: float | None = 0.5,
) -> ModeRun:
    run = ModeRun(engine.mode)
    # the engine is fresh, so this is the cost of one unadapted evaluation
    flat_omega = engine.rc.Omega
    next_poll = poll if poll else math.inf
    next_window = window
    window_start = 0.0
    counts_before = {n: t.accepted for n, t in engine.trackers.items()}

    def close_window(start: float, end: float) -> None:
        nonlocal counts_before
        counts = {n: t.accepted - counts_before[n] for n, t in engine.trackers.items()}
        counts_before = {n: t.accepted for n, t in engine.trackers.items()}
        run.rows.append(
            {
                "window_start_s": start,
                "mode": engine.mode,
                "cum_ops": run.ops,
                "cum_wall_us": run.wall_us,
                "memo_nodes": engine.rc.memo_nodes,
                "layers": engine.rc.layers,
                "partition_mae": partition_mae(engine, trace, end, counts, window),
                "gain_counted": _gain(run.evaluations * flat_omega, run.ops),
            }
        )

    def advance(t: float) -> None:
        nonlocal next_poll, next_window, window_start
        while min(next_poll, next_window) <= t:
            if next_poll <= next_window:
                if engine.mode != "flat":
                    start = time.perf_counter_ns()
                    engine.poll(next_poll)
                    run.wall_us += (time.perf_counter_ns() - start) // 1000
                next_poll += poll
            else:
                close_window(window_start, next_window)
                window_start = next_window
                next_window += window

    for i, msg in enumerate(trace.messages):
        advance(msg.timestamp)
        start = time.perf_counter_ns()
        res = engine.step(msg)
        run.wall_us += (time.perf_counter_ns() - start) // 1000
        if res.value is not None:
            run.ops += res.ops
            run.evaluations += 1
            run.values[i] = res.value
    advance(trace.duration)
    if window_start < trace.duration:
        close_window(window_start, trace.duration)
    run.moves = list(engine.moves)
    run.adapt_ops = engine.rc.adapt_ops
    run.memo_nodes = engine.rc.memo_nodes
    run.layers = engine.rc.layers
    return run


def run_benchmark(
    factory: Callable[[str], Engine],
    trace: Trace,
    modes: Iterable[str] = MODES,
    window: float = 1.0,
    poll: float | None = 0.5,
) -> BenchmarkResult:
    """Run each mode over ``trace`` with a fresh engine from ``factory(mode)``."""
    modes = [m for m in MODES if m in set(modes)]
    if not modes:
        raise ValueError("at least one mode is required")
    runs: dict[str, ModeRun] = {}
    flat_omega = 0
    for mode in modes:
        engine = factory(mode)
        flat_omega = engine.rc.Omega
        runs[mode] = run_mode(engine, trace, window, poll)
    reference = runs[modes[0]].values
    diff = 0.0
    for run in runs.values():
        if run.values.keys() != reference.keys():
            raise AssertionError(f"{run.mode} published on different events than {modes[0]}")
        for i, v in run.values.items():
            diff = max(diff, abs(v - reference[i]))
    return BenchmarkResult(runs, flat_omega, diff, window)
