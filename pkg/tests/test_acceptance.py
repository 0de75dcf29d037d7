"""The eight acceptance criteria, one test each, each printing a pass/fail line.

Run alone with ``pytest tests/test_acceptance.py`` or ``python tests/test_acceptance.py``.
"""

import random
import statistics
import time

import pytest

from corpus import MALFORMED
from oracles import literal_weights, program_wmc, random_polynomial, random_program
from resin import programs
from resin.bench import (
    DroneScenario,
    SyntheticWorkload,
    drone_program,
    run_benchmark,
    run_drone_scenario,
    simulate_tracking,
    worked_example,
    worked_example_trace,
)
from resin.bench.synthetic import plasticity_sweep
from resin.circuit import ReactiveCircuit
from resin.cli import drone_config
from resin.errors import ResinError
from resin.grounder import WmcPolynomial, build_wmc_polynomial, enumerate_stable_models, ground
from resin.lang import load_program, parse_text, pretty, typecheck
from resin.runtime import BusMessage, EngineConfig, Probability, compile_engines, polynomial_engine


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def test_1_worked_example(report):
    start = time.perf_counter()
    (gp,) = ground(load_program(programs.read("d")))
    models = [str(m) for m in enumerate_stable_models(gp)]
    rc = ReactiveCircuit.from_polynomial(build_wmc_polynomial(enumerate_stable_models(gp), gp.source_names))
    for atom, w in (("a", 0.5), ("b", 0.4), ("c", 0.2)):
        rc.set_signal(atom, w)
    rc.evaluate_full()
    flat_omega = rc.omega[rc.root]
    rc.drop({"b", "c"})
    root_omega = rc.omega[rc.root]
    rc.update("a", 0.7)
    _, ops_a = rc.react()
    rc.update("b", 0.9)
    _, ops_b = rc.react()
    elapsed = time.perf_counter() - start
    got = (models, flat_omega, root_omega, ops_a, ops_b)
    ok = got == (["{a, b, ¬c}", "{¬a, b, c}"], 5, 3, 3, 5) and elapsed < 1.0
    report(1, ok, f"models={models} omega0 flat={flat_omega} dropped={root_omega} ops a={ops_a} b={ops_b} ({elapsed:.3f}s)")


def test_2_oracle_wmc_equivalence(report):
    start = time.perf_counter()
    rng = random.Random(2024)
    failures, done, worst = 0, 0, 0.0
    cfg = EngineConfig(epsilon=0.0, hysteresis=1, h=2.0)
    while done < 500:
        prog = random_program(rng, max_sources=12)
        weights = {s: rng.random() for s in prog.sources}
        expected, count = program_wmc(prog, weights)
        if count > 200:
            continue
        (engine,) = compile_engines(prog.text, cfg, "reactive")
        relevant = [s.name for s in engine.gp.sources]
        t = 0.0
        for s in relevant:
            t += 0.01
            engine.step(BusMessage(f"/{s}", Probability(weights[s]), t))
        # a few updates at uneven rates so the policy reshapes the circuit
        for _ in range(10 if relevant else 0):
            s = rng.choice(relevant)
            t += 0.01 if s == relevant[0] else rng.uniform(0.1, 2.0)
            weights[s] = rng.random()
            engine.step(BusMessage(f"/{s}", Probability(weights[s]), t))
        expected, _ = program_wmc(prog, weights)
        got = engine.last_value if relevant else engine.rc.evaluate_full()
        err = abs(got - expected)
        worst = max(worst, err)
        failures += err > 1e-9
        done += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    report(2, ok, f"{done} programs, failures={failures}, max abs err={worst:.2e} ({elapsed:.1f}s)")


def test_3_value_preservation(report):
    start = time.perf_counter()
    rng = random.Random(3)
    failures, worst = 0, 0.0
    for _ in range(200):
        atoms, terms = random_polynomial(rng, 10, 64)
        rc = ReactiveCircuit.from_polynomial(WmcPolynomial(atoms, terms))
        before = rc.evaluate_full(literal_weights(atoms, rng))
        for _ in range(20):
            S = rng.sample(atoms, rng.randint(1, len(atoms)))
            getattr(rc, rng.choice(["lift", "drop"]))(S)
            rc.check_invariants()
            rel = abs(rc.value - before) / max(abs(before), 1e-300)
            worst = max(worst, rel)
            failures += rel > 1e-12
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed < 60
    report(3, ok, f"200 circuits x 20 steps, failures={failures}, max rel err={worst:.2e} ({elapsed:.1f}s)")


def test_4_rate_accounting(report):
    rc = ReactiveCircuit.from_polynomial(worked_example())
    rc.drop({"b", "c"})
    rho_max, rho_rc, gain = rc.rates({"a": 5, "b": 1, "c": 1})
    exact = (rho_max, rho_rc, gain) == (35, 25, 1.4)

    cfg = EngineConfig(h=5.0, epsilon=0.0, hysteresis=1)

    def factory(mode):
        e = polynomial_engine(worked_example(), cfg, mode)
        e.oracle_rates = {"a": 5.0, "b": 1.0, "c": 1.0}
        return e

    res = run_benchmark(factory, worked_example_trace(100.0, seed=0), ["flat", "reactive"])
    measured = res.gain("reactive")
    within = abs(measured - 1.4) <= 0.14

    rng = random.Random(4)
    min_gain = float("inf")
    for _ in range(300):
        atoms, terms = random_polynomial(rng, 8, 40)
        r = ReactiveCircuit.from_polynomial(WmcPolynomial(atoms, terms))
        for _ in range(rng.randint(0, 8)):
            getattr(r, rng.choice(["lift", "drop"]))(rng.sample(atoms, rng.randint(1, len(atoms))))
        for _ in range(5):
            min_gain = min(min_gain, r.rates({a: rng.uniform(0, 50) for a in atoms})[2])
    ok = exact and within and min_gain >= 1.0
    report(
        4,
        ok,
        f"rates=({rho_max}, {rho_rc}, {gain}) measured gain={measured:.3f} "
        f"(flat {res.runs['flat'].ops}, reactive {res.runs['reactive'].ops}) min gain={min_gain:.3f}",
    )


def test_5_foc_tracking(report):
    start = time.perf_counter()
    runs = [simulate_tracking(seed) for seed in range(20)]
    in_band = statistics.fmean(r.in_band(5.0) for r in runs)
    hs = (1.0, 5.0, 10.0, 30.0)
    maes = [statistics.fmean(r.mae(h) for r in runs) for h in hs]
    monotone = all(b <= a for a, b in zip(maes, maes[1:]))
    elapsed = time.perf_counter() - start
    ok = in_band >= 0.8 and monotone and elapsed < 30
    mae_text = ", ".join(f"h={h:g}:{m:.3f}" for h, m in zip(hs, maes))
    report(5, ok, f"in band at h=5: {in_band:.3f}; MAE {mae_text} ({elapsed:.1f}s)")


def drone_run(cfg, seconds=60.0, modes=("flat", "adapted", "reactive"), seed=0):
    sc = DroneScenario(n_drones=5, seed=seed, duration=seconds)
    trace, phases = run_drone_scenario(sc)
    text = drone_program(5)
    return run_benchmark(lambda m: compile_engines(text, cfg, m)[0], trace, modes), phases


def test_6_plasticity(report):
    points = plasticity_sweep(SyntheticWorkload())
    memo = [p.memo_nodes for p in points]
    layers = [p.layers for p in points]
    sweep_ok = all(b >= a for a, b in zip(memo, memo[1:])) and all(b >= a for a, b in zip(layers, layers[1:]))

    res, phases = drone_run(drone_config(), modes=["reactive"])
    moves = [m.time for m in res.runs["reactive"].moves]
    missed = [p for p in phases if not any(p.time <= t <= p.time + 5.0 for t in moves)]
    migrate_ok = bool(phases) and not missed

    single, _ = drone_run(drone_config().with_(h=1e9, max_band=None), modes=["adapted", "reactive"])
    single_moves = sum(len(r.moves) for r in single.runs.values())
    ok = sweep_ok and migrate_ok and single_moves == 0
    report(
        6,
        ok,
        f"h=30,10,5,1 memo={memo} layers={layers}; {len(phases)} phase changes, "
        f"{len(missed)} without a migration within 5 s; single-band moves={single_moves}",
    )


def test_7_speedup_ordering(report):
    start = time.perf_counter()
    res, _ = drone_run(drone_config())
    ops = {m: r.ops for m, r in res.runs.items()}
    elapsed = time.perf_counter() - start
    ok = (
        ops["reactive"] < ops["adapted"] < ops["flat"]
        and ops["reactive"] * 10 <= ops["flat"]
        and res.max_mode_diff <= 1e-9
        and elapsed < 300
    )
    report(
        7,
        ok,
        f"flat={ops['flat']} adapted={ops['adapted']} reactive={ops['reactive']} "
        f"gain={ops['flat'] / ops['reactive']:.1f}x mode diff={res.max_mode_diff:.1e} ({elapsed:.1f}s)",
    )


def test_8_parser_corpus(report):
    problems = []
    for name in programs.NAMES:
        text = programs.read(name)
        try:
            prog = parse_text(text)
            typecheck(prog)
            if parse_text(pretty(prog)) != prog:
                problems.append(f"{name}: round trip differs")
        except ResinError as exc:
            problems.append(f"{name}: {exc}")
    checked = 0
    for name, (text, cls, kind, _) in sorted(MALFORMED.items())[:10]:
        try:
            ground(typecheck(parse_text(text)))
            problems.append(f"{name}: accepted")
        except ResinError as exc:
            if type(exc) is not cls or exc.kinds[0] != kind:
                problems.append(f"{name}: got {type(exc).__name__}/{exc.kinds[0]}")
        checked += 1
    ok = not problems and checked == 10
    report(8, ok, f"{len(programs.NAMES)} shipped programs, {checked} malformed variants; problems={problems}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
