"""Command-line entry point: ``donsa {run,sweep,compare,audit,selftest}``."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .assignment import (Direct, Relayed, audit_conflicts, dump_result, load_result)
from .baselines import ALGORITHMS, get_algorithm, run_algorithm
from .config import Config, config_to_dict, load_config, with_scenario
from .errors import ConfigError, DonsaError
from .experiments import compute_adr, default_jobs, emit_results, preset, run_scenario
from .hungarian import BACKEND
from .selftest import run_selftest
from .topology import Topology, build_rate_table, generate_cell


def _base_config(args) -> Config:
    return load_config(args.config) if args.config else Config()


def _instance(args, cfg: Config):
    rng = np.random.default_rng(args.seed)
    if args.topology:
        topo = Topology.from_text(Path(args.topology).read_text())
    else:
        topo = generate_cell(args.sources, args.relays, args.bs, args.radius, args.bw, rng)
    return topo, build_rate_table(topo, cfg.rf_catalog, cfg.channel_model, rng)


def _describe(d) -> str:
    if isinstance(d, Relayed):
        return f"relay {d.relay} via {d.m2m_rf} -> bs {d.bs} via {d.m2b_rf}"
    if isinstance(d, Direct):
        return f"direct -> bs {d.bs} via {d.m2b_rf}"
    return "unmatched"


def cmd_run(args) -> int:
    cfg = _base_config(args)
    if args.repair_conflicts:
        cfg.repair_conflicts = True
    topo, table = _instance(args, cfg)
    spec = get_algorithm(args.algorithm)
    result = run_algorithm(spec, topo, table, cfg.rf_catalog, cfg.solver_options)
    for s, (d, c) in enumerate(zip(result.decisions, result.rates)):
        print(f"source {s}: {_describe(d)}  rate={c:.6g} bits/s")
    n_s = topo.n_sources
    adr = compute_adr(result, n_s) if n_s else 0.0
    print(f"algorithm={spec.name} k={result.k} matched={result.matched} unmatched={result.unmatched}")
    print(f"objective_total={result.objective_total!r} bits/s  adr={adr!r} bits/s")
    if args.dump:
        Path(args.dump).write_text(dump_result(result))
    return 0


def cmd_compare(args) -> int:
    cfg = _base_config(args)
    topo, table = _instance(args, cfg)
    names = args.algorithms.split(",") if args.algorithms else list(ALGORITHMS)
    print(f"{'algorithm':<16}{'objective_bits_per_s':>24}{'adr_bits_per_s':>20}{'nus':>6}{'ms':>10}")
    for name in names:
        t0 = time.perf_counter()
        res = run_algorithm(get_algorithm(name), topo, table, cfg.rf_catalog, cfg.solver_options)
        ms = (time.perf_counter() - t0) * 1e3
        adr = compute_adr(res, topo.n_sources) if topo.n_sources else 0.0
        print(f"{name:<16}{res.objective_total:>24.6g}{adr:>20.6g}{res.unmatched:>6}{ms:>10.1f}")
    return 0


def _sweep_config(args) -> Config:
    cfg = _base_config(args)
    overrides = {}
    if args.scenario:
        sc = preset(args.scenario)
        cfg = with_scenario(cfg, **{k: getattr(sc, k) for k in sc.__dataclass_fields__})
    if args.runs is not None:
        overrides["runs"] = args.runs
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.algorithms:
        overrides["algorithms"] = tuple(args.algorithms.split(","))
    if overrides:
        cfg = with_scenario(cfg, **overrides)
    if args.out:
        cfg.output_dir = args.out
    if args.repair_conflicts:
        cfg.repair_conflicts = True
    return cfg


def cmd_sweep(args) -> int:
    cfg = _sweep_config(args)  # fully validated before anything is written
    jobs = args.jobs or default_jobs()
    report = run_scenario(cfg.scenario, cfg.rf_catalog, cfg.channel_model,
                          cfg.solver_options, jobs=jobs)
    files = emit_results(report, cfg.output_dir, config_to_dict(cfg))
    for f in files:
        print(f)
    return 0


def cmd_audit(args) -> int:
    result = load_result(Path(args.result).read_text())
    report = audit_conflicts(result)
    for line in report.lines():
        print(line)
    print(f"conflicts: {len(report.relay_reuse)} relay reuse, {len(report.bs_overuse)} bs over quota; "
          f"matched per bs: {json.dumps(report.per_bs_matched, sort_keys=True)}")
    return 0


def cmd_selftest(args) -> int:
    failures = run_selftest(args.instances, args.seed)
    for i, got, want in failures:
        print(f"FAIL instance {i}: pipeline={got!r} brute_force={want!r}")
    status = "PASS" if not failures else "FAIL"
    print(f"{status}: {args.instances - len(failures)}/{args.instances} instances match "
          f"the brute-force optimum (solver backend: {BACKEND})")
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="donsa", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def instance_flags(sp):
        sp.add_argument("--config")
        sp.add_argument("--sources", type=int, default=150)
        sp.add_argument("--relays", type=int, default=150)
        sp.add_argument("--bs", type=int, default=1)
        sp.add_argument("--radius", type=float, default=500.0, help="cell radius in metres")
        sp.add_argument("--bw", type=float, default=200e3, help="requested bandwidth in Hz")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--topology", help="node file written by Topology.to_text")

    sp = sub.add_parser("run", help="solve one instance and print the assignment")
    instance_flags(sp)
    sp.add_argument("--algorithm", default="donsa_wbz_lmn", choices=sorted(ALGORITHMS))
    sp.add_argument("--repair-conflicts", action="store_true")
    sp.add_argument("--dump", help="write the result for the audit subcommand")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("compare", help="all algorithms on one instance")
    instance_flags(sp)
    sp.add_argument("--algorithms")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep", help="Monte-Carlo scenario sweep to CSV and SVG")
    sp.add_argument("--config")
    sp.add_argument("--scenario", choices=["s1", "s2", "s3"])
    sp.add_argument("--runs", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--jobs", type=int)
    sp.add_argument("--out")
    sp.add_argument("--algorithms", help="comma-separated, e.g. donsa_wbz_lmn,ditosa_l")
    sp.add_argument("--repair-conflicts", action="store_true")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("audit", help="report per-resource conflicts in a dumped result")
    sp.add_argument("result")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("selftest", help="pipeline vs brute force on tiny instances")
    sp.add_argument("--instances", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DonsaError, KeyError, ValueError, OSError) as exc:
        print(f"donsa {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
