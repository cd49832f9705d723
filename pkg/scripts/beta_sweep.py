"""Runtime and acceptance of BnB* as the branch limit grows, against BFN.

    python3 scripts/beta_sweep.py --topology 2-ary --count 15
"""
import argparse
import os

from flexslice.harness import ScenarioSpec, compare_settings, write_table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--topology", default="2-ary")
    parser.add_argument("--count", type=int, default=15)
    parser.add_argument("--betas", default="1,2,3,5,10,inf")
    parser.add_argument("--out", default="results/beta_sweep.csv")
    args = parser.parse_args()

    betas = [None if b == "inf" else int(b) for b in args.betas.split(",")]
    variants = [{"algorithm": "bnb", "beta": b} for b in betas] + [{"algorithm": "bfn"}]
    rows = compare_settings(ScenarioSpec(args.topology, count=args.count), variants)
    for row in rows:
        print(f"{row['label']:18s} accepted {row['accepted']:>3}  objective {row['objective']}  {row['wall_time']} s")
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    write_table(rows, args.out)


if __name__ == "__main__":
    main()
