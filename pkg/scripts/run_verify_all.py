"""Run the certification suite for several seeds and report per-experiment pass counts."""
import argparse
import collections
import os

from delegation_lab.harness import run_all, verify_all_configs, write_csv


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[42])
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    for seed in args.seeds:
        rows = run_all(verify_all_configs(seed))
        write_csv(rows, os.path.join(args.out, f"verify_all_seed{seed}.csv"))
        tally = collections.Counter()
        for r in rows:
            tally[(r.experiment, r.passed)] += 1
        print(f"seed {seed}: {sum(r.passed for r in rows)}/{len(rows)} rows pass")
        for exp in dict.fromkeys(r.experiment for r in rows):
            bad = tally[(exp, False)]
            print(f"  {exp:<26} {tally[(exp, True)]} pass" + (f", {bad} FAIL" if bad else ""))


if __name__ == "__main__":
    main()
