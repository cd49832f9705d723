"""Acceptance rate and runtime on the 2-ary fat-tree and Abilene with 15 slices.

Every algorithm runs under the three slice settings; one CSV row per run.

    python3 scripts/small_scale.py --out results/small_scale.csv
"""
import argparse
import os

from flexslice.harness import ScenarioSpec, compare_settings, write_table

VARIANTS = [
    {"algorithm": algo, "beta": beta, "setting": setting}
    for algo, beta in (("bnb", None), ("bnb", 3), ("bfn", None))
    for setting in ("flexible", "k1-only", "k2-only")
]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/small_scale.csv")
    parser.add_argument("--count", type=int, default=15)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scale", type=float, default=1.0)
    args = parser.parse_args()

    rows = []
    for topology in ("2-ary", "abilene"):
        base = ScenarioSpec(topology, count=args.count, seed=args.seed, scale=args.scale)
        for row in compare_settings(base, VARIANTS):
            print(f"{topology:8s} {row['label']:22s} rate {row['acceptance_rate']}  {row['wall_time']} s")
            rows.append(row)
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    write_table(rows, args.out)


if __name__ == "__main__":
    main()
