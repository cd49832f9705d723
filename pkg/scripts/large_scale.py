"""Acceptance rate and runtime on the 6-ary fat-tree and Cost266 with 75 slices.

BnB* without a branch limit takes tens of seconds per run here; pass
``--skip-unlimited`` for a quick pass.

    python3 scripts/large_scale.py --out results/large_scale.csv
"""
import argparse
import os

from flexslice.harness import ScenarioSpec, compare_settings, write_table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/large_scale.csv")
    parser.add_argument("--count", type=int, default=75)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--skip-unlimited", action="store_true")
    args = parser.parse_args()

    solvers = [("bnb", 3), ("bfn", None)]
    if not args.skip_unlimited:
        solvers.insert(0, ("bnb", None))
    variants = [
        {"algorithm": algo, "beta": beta, "setting": setting}
        for algo, beta in solvers
        for setting in ("flexible", "k1-only", "k2-only")
    ]
    rows = []
    for topology in ("6-ary", "cost266"):
        base = ScenarioSpec(topology, count=args.count, seed=args.seed)
        for row in compare_settings(base, variants):
            print(f"{topology:8s} {row['label']:22s} rate {row['acceptance_rate']}  {row['wall_time']} s", flush=True)
            rows.append(row)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    write_table(rows, args.out)


if __name__ == "__main__":
    main()
