"""Workload generators and the three-mode benchmark driver."""

from resin.bench.drones import DroneScenario, drone_program, run_drone_scenario
from resin.bench.runner import CSV_HEADER, BenchmarkResult, Trace, run_benchmark, run_mode
from resin.bench.synthetic import SyntheticWorkload, gen_synthetic, worked_example, worked_example_trace
from resin.bench.tracking import simulate_tracking

__all__ = [
    "CSV_HEADER",
    "BenchmarkResult",
    "DroneScenario",
    "SyntheticWorkload",
    "Trace",
    "drone_program",
    "gen_synthetic",
    "run_benchmark",
    "run_drone_scenario",
    "run_mode",
    "simulate_tracking",
    "worked_example",
    "worked_example_trace",
]
