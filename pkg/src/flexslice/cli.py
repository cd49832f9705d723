"""Command line entry point: ``flexslice <command> ...``."""
from __future__ import annotations

import argparse
import json
import sys

from . import exact
from .errors import FlexSliceError
from .model import objective_value, validate_embedding
from .harness import (
    ScenarioSpec,
    compare_settings,
    dump_report,
    load_compare_file,
    prepare,
    run_scenario,
    write_table,
)
from .topology import PRESETS, dump_graph, gen_fat_tree, load_graph


def _beta(text: str) -> int | None:
    if text.lower() in ("inf", "none", "unlimited"):
        return None
    return int(text)


def _scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--topology", required=True, help="fat-tree preset, bundled graph name, or graph JSON file")
    p.add_argument("--slices", default="video", help="slice template JSON file or bundled name (default: video)")
    p.add_argument("--count", type=int, default=15, help="number of slice replicas")
    p.add_argument("--setting", default="flex", help="flex, k1, k2, ... (kN pins every slice to configuration N)")
    p.add_argument("--gamma", type=float, default=0.999)
    p.add_argument("--scale", type=float, default=1.0, help="multiply every demand of the template")


def _spec(args, **extra) -> ScenarioSpec:
    return ScenarioSpec(
        topology=args.topology,
        template=args.slices,
        count=args.count,
        setting=args.setting,
        gamma=args.gamma,
        scale=args.scale,
        **extra,
    )


def cmd_topo_gen(args) -> None:
    text = json.dumps(dump_graph(gen_fat_tree(args.preset)), indent=1) + "\n"
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_topo_load(args) -> None:
    with open(args.file) as f:
        net = load_graph(f.read())
    print(f"{len(net.node_ids)} nodes, {len(net.link_ends)} directed links, axes {', '.join(net.axes)}")


def cmd_solve(args) -> None:
    spec = _spec(args, algorithm=args.algo, beta=args.beta, seed=args.seed, rho1=args.rho1, rho2=args.rho2)
    result, report = run_scenario(spec, out=args.out, csv_path=args.csv)
    s = report["summary"]
    rate = "n/a" if s["acceptance_rate"] is None else f"{s['acceptance_rate']:.3f}"
    print(
        f"{spec.name}: accepted {s['accepted']}/{s['slices']} (rate {rate}), "
        f"objective {s['objective']:.6f}, {result.wall_time:.3f} s"
    )
    if not args.out:
        sys.stdout.write(dump_report(report))


def cmd_export_lp(args) -> None:
    scenario = prepare(_spec(args))
    text = exact.export_lp(scenario.network, scenario.slices, gamma=args.gamma, big_m=args.big_m)
    with open(args.out, "w") as f:
        f.write(text)
    print(f"wrote {args.out}: {exact.count_rows(text)} constraints")


def cmd_import_solution(args) -> None:
    scenario = prepare(_spec(args))
    with open(args.solution) as f:
        decisions = exact.import_solution(f.read(), scenario.network, scenario.slices)
    report = validate_embedding(scenario.network, list(zip(scenario.slices, decisions)))
    accepted = sum(d.accepted for d in decisions)
    print(f"accepted {accepted}/{len(decisions)}, objective {objective_value(decisions, args.gamma):.6f}")
    if not report.ok:
        print(report)
        raise SystemExit(1)


def cmd_compare(args) -> None:
    with open(args.specs) as f:
        base, variants = load_compare_file(f.read())
    rows = compare_settings(base, variants)
    write_table(rows, args.out)
    for row in rows:
        print(f"{row['label']}: rate {row['acceptance_rate']}, objective {row['objective']}, {row['wall_time']} s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flexslice")
    sub = parser.add_subparsers(dest="command", required=True)

    topo = sub.add_parser("topo", help="generate or inspect topologies")
    topo_sub = topo.add_subparsers(dest="topo_command", required=True)
    gen = topo_sub.add_parser("gen", help="write a fat-tree preset as a graph document")
    gen.add_argument("preset", choices=sorted(PRESETS))
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_topo_gen)
    load = topo_sub.add_parser("load", help="parse a graph document and print its size")
    load.add_argument("file")
    load.set_defaults(func=cmd_topo_load)

    solve = sub.add_parser("solve", help="run one scenario")
    _scenario_args(solve)
    solve.add_argument("--algo", choices=["exact", "bnb", "bfn"], default="bnb")
    solve.add_argument("--beta", type=_beta, default=None, help="branch limit per configuration; 'inf' for none")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--rho1", type=float, default=0.5)
    solve.add_argument("--rho2", type=float, default=0.5)
    solve.add_argument("--out", help="JSON report path (printed to stdout when omitted)")
    solve.add_argument("--csv", help="append a result row to this CSV file")
    solve.set_defaults(func=cmd_solve)

    lp = sub.add_parser("export-lp", help="write the linearized model in LP format")
    _scenario_args(lp)
    lp.add_argument("--big-m", type=float, default=None)
    lp.add_argument("--out", required=True)
    lp.set_defaults(func=cmd_export_lp)

    imp = sub.add_parser("import-solution", help="check a MILP solution given as 'name value' lines")
    _scenario_args(imp)
    imp.add_argument("solution")
    imp.set_defaults(func=cmd_import_solution)

    cmp_ = sub.add_parser("compare", help="run variants of one scenario and write a CSV table")
    cmp_.add_argument("--specs", required=True, help='JSON: {"base": {...}, "variants": [{...}, ...]}')
    cmp_.add_argument("--out", required=True)
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (FlexSliceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
