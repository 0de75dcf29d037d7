"""Command line interface.

Exit status is 0 on success, 1 when the program has diagnostics and 2 for
usage or runtime errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import threading
import time
from dataclasses import replace

from resin.errors import ResinError
from resin.foc import ConfigError, KalmanConfig
from resin.grounder import artifact, enumerate_stable_models, ground
from resin.lang import load_program
from resin.runtime.config import EngineConfig, load_config
from resin.runtime.engine import MODES

log = logging.getLogger("resin")


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _config(args) -> EngineConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else EngineConfig()
    return cfg


def _modes(text: str) -> list[str]:
    modes = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in modes if m not in MODES]
    if bad or not modes:
        raise argparse.ArgumentTypeError(f"modes must be a comma-separated subset of {','.join(MODES)}")
    return modes


def cmd_check(args) -> int:
    load_program(_read(args.file))
    return 0


def cmd_compile(args) -> int:
    typed = load_program(_read(args.file))
    targets = []
    for gp in ground(typed):
        if args.target and gp.target != args.target:
            continue
        models = enumerate_stable_models(gp, args.max_sources)
        doc = artifact(gp, models)
        doc["stable_models"] = [str(m) for m in models]
        targets.append(doc)
    if args.target and not targets:
        print(f"{args.file}: no target named {args.target}", file=sys.stderr)
        return 2
    text = json.dumps({"program": args.file, "targets": targets}, indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def cmd_dump(args) -> int:
    from resin.circuit import ReactiveCircuit
    from resin.grounder import build_wmc_polynomial

    typed = load_program(_read(args.file))
    for gp in ground(typed):
        if args.target and gp.target != args.target:
            continue
        models = enumerate_stable_models(gp, args.max_sources)
        rc = ReactiveCircuit.from_polynomial(build_wmc_polynomial(models, gp.source_names))
        for step in args.steps:
            op, _, atoms = step.partition(":")
            getattr(rc, op)([a for a in atoms.split(";") if a])
        print(f"# target {gp.target} on {gp.target_channel}: Omega={rc.Omega} layers={rc.layers}")
        print(rc.dump())
    return 0


def cmd_run(args) -> int:
    from resin.runtime.bridge import BridgeServer
    from resin.runtime.bus import Bus
    from resin.runtime.engine import compile_engines, start_engines

    cfg = _config(args)
    bus = Bus(cfg.queue_bound)
    engines = compile_engines(_read(args.file), cfg, args.mode, bus)
    host, port = cfg.bridge_host, cfg.bridge_port
    if args.bridge:
        host, _, p = args.bridge.rpartition(":")
        host, port = host or "127.0.0.1", int(p)
    server = BridgeServer(bus, host, port).start()
    subs = [bus.subscribe(e.gp.target_channel) for e in engines]
    threads = start_engines(engines)
    print(json.dumps({"bridge": list(server.address), "targets": [e.gp.target_channel for e in engines]}), flush=True)
    stop = threading.Event()
    deadline = time.monotonic() + args.duration if args.duration else None
    try:
        while not stop.is_set() and (deadline is None or time.monotonic() < deadline):
            for sub in subs:
                for msg in sub.drain():
                    print(json.dumps(msg.to_json()), flush=True)
            time.sleep(0.02)
    except KeyboardInterrupt:
        pass
    finally:
        for t in threads:
            t.stop()
        server.stop()
    return 0


def cmd_bench_synthetic(args) -> int:
    from resin.bench import SyntheticWorkload, gen_synthetic, run_benchmark
    from resin.runtime.engine import polynomial_engine

    cfg = _config(args) if args.config else synthetic_config()
    if args.h is not None:
        cfg = cfg.with_(h=args.h)
    w = SyntheticWorkload(
        n_signals=args.signals,
        models=args.models,
        sources_per_model=args.sources_per_model,
        seed=args.seed,
        duration=args.seconds,
    )
    poly, trace = gen_synthetic(w)
    result = run_benchmark(lambda m: polynomial_engine(poly, cfg, m), trace, args.modes, args.window)
    return _report(result, args)


def cmd_bench_drones(args) -> int:
    from resin.bench import DroneScenario, drone_program, run_benchmark, run_drone_scenario
    from resin.runtime.engine import compile_engines

    cfg = _config(args) if args.config else drone_config()
    if args.h is not None:
        cfg = cfg.with_(h=args.h)
    if args.max_band is not None:
        cfg = cfg.with_(max_band=None if args.max_band < 0 else args.max_band)
    sc = DroneScenario(n_drones=args.drones, seed=args.seed, duration=args.seconds)
    trace, _ = run_drone_scenario(sc)
    text = drone_program(sc.n_drones, sc.safety_radius)
    result = run_benchmark(lambda m: compile_engines(text, cfg, m)[0], trace, args.modes, args.window)
    return _report(result, args)


def synthetic_config() -> EngineConfig:
    """Policy runs twice a second; per-update runs thrash on 100 noisy Poisson rates."""
    return EngineConfig(epsilon=0.0, adapt_interval=0.5)


def drone_config() -> EngineConfig:
    """Two bands (quiet and moving) with a gated filter; see the README."""
    return EngineConfig(h=5.0, epsilon=0.0, max_band=1, kalman=replace(KalmanConfig(), gate=4.0))


def _report(result, args) -> int:
    result.write(args.csv, args.json)
    if not args.csv:
        sys.stdout.write(result.csv())
    if not args.json:
        print(json.dumps(result.summary(), indent=2, sort_keys=True), file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resin", description="Resin compiler, runtime and benchmarks.")
    p.add_argument("-v", "--verbose", action="store_true", help="log debug output")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    c = sub.add_parser("check", help="parse and type check a program")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("compile", help="ground a program and emit its models as JSON")
    c.add_argument("file")
    c.add_argument("--target", help="only this target atom")
    c.add_argument("-o", "--output", help="write JSON here instead of stdout")
    c.add_argument("--max-sources", type=int, default=24)
    c.set_defaults(func=cmd_compile)

    c = sub.add_parser("dump-circuit", help="print the reactive circuit of each target")
    c.add_argument("file")
    c.add_argument("--target")
    c.add_argument("--max-sources", type=int, default=24)
    c.add_argument(
        "--step",
        dest="steps",
        action="append",
        default=[],
        metavar="OP:ATOMS",
        help="apply drop:a;b or lift:a before dumping (repeatable)",
    )
    c.set_defaults(func=cmd_dump)

    c = sub.add_parser("run", help="run engines on a bus exposed through the socket bridge")
    c.add_argument("file")
    c.add_argument("--config")
    c.add_argument("--mode", choices=MODES, default="reactive")
    c.add_argument("--bridge", help="host:port to listen on (port 0 picks a free one)")
    c.add_argument("--duration", type=float, help="stop after this many seconds")
    c.set_defaults(func=cmd_run)

    for name, func in (("bench-synthetic", cmd_bench_synthetic), ("bench-drones", cmd_bench_drones)):
        c = sub.add_parser(name, help="run the three-mode benchmark")
        c.add_argument("--config")
        c.add_argument("--modes", type=_modes, default=list(MODES))
        c.add_argument("--seconds", type=float, default=10.0 if name == "bench-synthetic" else 60.0)
        c.add_argument("--seed", type=int, default=0)
        c.add_argument("--h", type=float)
        c.add_argument("--window", type=float, default=1.0)
        c.add_argument("--csv", help="CSV output path (default stdout)")
        c.add_argument("--json", help="JSON summary path (default stderr)")
        if name == "bench-synthetic":
            c.add_argument("--signals", type=int, default=100)
            c.add_argument("--models", type=int, default=1000)
            c.add_argument("--sources-per-model", type=int, default=20)
        else:
            c.add_argument("--drones", type=int, default=5)
            c.add_argument("--max-band", type=int, help="band cap; negative disables")
        c.set_defaults(func=func)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ResinError as exc:
        print(exc.format(getattr(args, "file", "<input>")), file=sys.stderr)
        return 1
    except (OSError, ConfigError, ValueError) as exc:
        print(f"resin: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
