#!/usr/bin/env python3
"""
OAS Sparrow
Command-line entry point: generate instances, solve, run the exact oracle,
benchmark grids and analyze instance properties
"""
import argparse
import json
import os
import sys

import pandas as pd
from dotenv import load_dotenv

# Load environment variables (OAS_* configuration overrides)
load_dotenv()

from config import settings
from config.solver_config import SolverConfig
from processors.instance_properties import properties
from processors.schedule import validate
from services import reporting
from services.harness import read_best_known, replay, run_grid, save_results
from services.instance_generator import GenSpec, family_grid, generate
from services.oracle import exact_solve
from services.solver import solve
from utils.errors import OasError
from utils.file_utils import ensure_directory, find_instance_files, get_base_filename, instance_filename
from utils.format_utils import format_duration
from utils.instance_io import read_instance, write_instance


def banner(title):
    print("\n" + "=" * 50)
    print(title)
    print("=" * 50)


def build_config(args):
    """Defaults < OAS_* environment < config file < command-line flags"""
    config = SolverConfig.from_env()
    if getattr(args, "config", None):
        config = SolverConfig.from_file(args.config, config)
    if getattr(args, "set", None) is not None:
        config = SolverConfig.for_parameter_set(args.set, config)
    config = config.replace(
        seed=getattr(args, "seed", None),
        population_size=getattr(args, "population", None),
        max_iterations=getattr(args, "max_iterations", None),
        max_no_improve=getattr(args, "max_no_improve", None),
        n_jobs=getattr(args, "jobs", None),
    )
    if getattr(args, "no_alns", False):
        config = config.replace(alns_enabled=False)
    if getattr(args, "parallel", False):
        config = config.replace(parallel=True)
    if getattr(args, "verbose", False):
        config = config.replace(verbose=True)
    return config.validate()


def load_instances(paths):
    files = find_instance_files(paths)
    if not files:
        raise OasError(f"No instance files found in: {', '.join(paths)}")
    return [read_instance(path) for path in files]


def generation_specs(args):
    if args.spec:
        spec = GenSpec.from_file(args.spec)
        return [GenSpec(**{**spec.to_dict(), "replicate": i}) for i in range(args.count)]
    if args.grid:
        return family_grid(args.family, seed=args.seed, per_cell=args.count,
                           sizes=args.n or None, factors=args.factors or None)
    specs = []
    for n in args.n or [25]:
        for i in range(args.count):
            specs.append(GenSpec(n=n, tau=args.tau, R=args.R, family=args.family,
                                 q=args.q, c=args.c, seed=args.seed, replicate=i))
    return specs


def cmd_generate(args):
    banner("🎯 GENERATING INSTANCES")
    specs = generation_specs(args)
    ensure_directory(args.output)
    for spec in specs:
        instance = generate(spec)
        write_instance(instance, os.path.join(args.output, instance_filename(instance.label)))
    print(f"✅ Wrote {len(specs)} instances to {args.output}")


def cmd_solve(args):
    config = build_config(args)
    instance = read_instance(args.instance)
    banner(f"🎯 SOLVING {instance.label} ({instance.n} orders, {config.tag})")
    result = solve(instance, config)

    violations = validate(instance, result.best_schedule)
    if violations:
        for violation in violations:
            print(f"⚠️ {violation.kind}: {violation.message}")

    print(f"📊 Best fitness: {result.best_fitness:.4f} of {instance.total_revenue:.4f} total revenue")
    print(f"📊 Accepted orders: {result.accepted}/{instance.n}")
    print(f"📊 Generations: {result.generations} ({result.termination_reason})")
    print(f"📊 ALNS passes: {result.alns_invocations}")
    print(f"⏱️ Wall time: {format_duration(result.wall_time)}")

    if args.output:
        ensure_directory(args.output)
        path = os.path.join(args.output, f"{get_base_filename(args.instance)}_solution.json")
        payload = result.to_dict(instance)
        payload["config"] = config.to_dict()
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, ensure_ascii=False, indent=2)
        print(f"✅ Saved solution to {path}")


def cmd_oracle(args):
    instance = read_instance(args.instance)
    result = exact_solve(instance, n_limit=args.n_limit)
    text = json.dumps(result.to_dict(), indent=2)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        print(f"✅ Optimum {result.optimal} after {result.nodes} nodes, saved to {args.output}")
    else:
        print(text)


def bench_configs(args):
    if args.sets:
        return {f"set{tag}": build_config(argparse.Namespace(**{**vars(args), "set": tag})) for tag in args.sets}
    config = build_config(args)
    return {config.tag: config}


def cmd_bench(args):
    if args.replay:
        banner(f"🎯 REPLAYING {args.replay}")
        result = replay(args.replay, n_jobs=args.jobs or 1)
        save_results(result, args.output)
        return

    if args.instances:
        instances = load_instances(args.instances)
    else:
        specs = family_grid(args.family, seed=args.seed or 0, per_cell=args.count,
                            sizes=args.n or None, factors=args.factors or None)
        instances = [generate(spec) for spec in specs]

    seeds = args.seed_list or list(range(args.seeds))
    best_known = read_best_known(args.best_known) if args.best_known else None
    banner("🎯 BENCHMARK")
    result = run_grid(instances, bench_configs(args), seeds, reference_mode=args.reference,
                      best_known=best_known, baseline=args.baseline, n_jobs=args.jobs or 1)
    save_results(result, args.output)
    print(f"\n📊 {result.metric} by group:")
    print(result.summary.to_string(index=False))


def cmd_analyze(args):
    instances = load_instances(args.instances)
    banner(f"🔍 ANALYZING {len(instances)} INSTANCES")
    rows = []
    for instance in instances:
        report = properties(instance)
        rows.append({"instance": instance.label, **report.to_dict()})
    frame = pd.DataFrame(rows)
    ensure_directory(args.output)
    path = os.path.join(args.output, settings.PROPERTIES_CSV)
    frame.to_csv(path, index=False)
    print(f"✅ Saved properties to {path}")

    if args.runs:
        runs = pd.read_csv(args.runs)
        correlations = reporting.property_correlations(frame, runs)
        path = os.path.join(args.output, settings.PROPERTY_CORRELATIONS_CSV)
        correlations.to_csv(path, index=False)
        print(f"✅ Saved property correlations to {path}")


def add_solver_flags(parser):
    parser.add_argument("--config", help="key=value solver config file")
    parser.add_argument("--set", type=int, choices=sorted(settings.PARAMETER_SETS), help="parameter set tag")
    parser.add_argument("--seed", type=int, help="master random seed")
    parser.add_argument("--population", type=int, help="population size")
    parser.add_argument("--max-iterations", type=int, help="generation limit")
    parser.add_argument("--max-no-improve", type=int, help="generations without improvement before stopping")
    parser.add_argument("--no-alns", action="store_true", help="disable local search")
    parser.add_argument("--parallel", action="store_true", help="decode members on worker threads")
    parser.add_argument("--jobs", type=int, help="parallel workers")
    parser.add_argument("--verbose", action="store_true", help="print solver progress")


def add_grid_flags(parser):
    parser.add_argument("--family", choices=settings.FAMILIES, default="cesaret")
    parser.add_argument("--n", type=int, nargs="+", help="instance sizes")
    parser.add_argument("--factors", type=float, nargs="+", help="tau and R values of the cesaret grid")
    parser.add_argument("--count", type=int, default=settings.INSTANCES_PER_CELL, help="instances per cell")


def build_parser():
    parser = argparse.ArgumentParser(prog=settings.APP_NAME, description=settings.APP_DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write benchmark instances")
    add_grid_flags(gen)
    gen.add_argument("--tau", type=float, default=0.5)
    gen.add_argument("--R", type=float, default=0.5)
    gen.add_argument("--q", type=float, help="commerce revenue mix")
    gen.add_argument("--c", type=float, help="repairman horizon factor")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--spec", help="key=value generation spec file")
    gen.add_argument("--grid", action="store_true", help="the family's full parameter grid")
    gen.add_argument("--output", default="output/instances")
    gen.set_defaults(func=cmd_generate)

    sol = sub.add_parser("solve", help="solve one instance file")
    sol.add_argument("instance")
    add_solver_flags(sol)
    sol.add_argument("--output", help="directory for the solution JSON")
    sol.set_defaults(func=cmd_solve)

    ora = sub.add_parser("oracle", help="exact optimum of a small instance")
    ora.add_argument("instance")
    ora.add_argument("--n-limit", type=int, default=settings.ORACLE_N_LIMIT)
    ora.add_argument("--output", help="JSON output file")
    ora.set_defaults(func=cmd_oracle)

    bench = sub.add_parser("bench", help="run a benchmark grid")
    bench.add_argument("instances", nargs="*", help="instance files, directories or globs")
    add_grid_flags(bench)
    add_solver_flags(bench)
    bench.add_argument("--sets", type=int, nargs="+", choices=sorted(settings.PARAMETER_SETS))
    bench.add_argument("--seeds", type=int, default=10, help="runs per instance (seeds 0..k-1)")
    bench.add_argument("--seed-list", type=int, nargs="+", help="explicit seeds")
    bench.add_argument("--reference", choices=[settings.REFERENCE_ORACLE, settings.REFERENCE_BEST_KNOWN,
                                               settings.REFERENCE_BEST_OF_CONFIGS, settings.REFERENCE_NONE],
                       default=settings.REFERENCE_BEST_OF_CONFIGS)
    bench.add_argument("--best-known", help="CSV of instance,value best-known fitness")
    bench.add_argument("--baseline", help="configuration tag for relative gap columns")
    bench.add_argument("--replay", help="re-run a manifest.json")
    bench.add_argument("--output", default="output/bench")
    bench.set_defaults(func=cmd_bench)

    ana = sub.add_parser("analyze", help="instance properties and their link to difficulty")
    ana.add_argument("instances", nargs="+")
    ana.add_argument("--runs", help="runs.csv from a bench run")
    ana.add_argument("--output", default="output/analysis")
    ana.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None):
    """Main entry point"""
    args = build_parser().parse_args(argv)
    # oracle without --output writes bare JSON to stdout
    if args.command != "oracle":
        print(f"🐦 {settings.APP_NAME} {settings.APP_VERSION}")
    try:
        args.func(args)
    except OasError as e:
        print(f"❌ {e}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
