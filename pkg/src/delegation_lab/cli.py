"""Command line: ``delegation-lab {run,verify-all,lemmas,alpha,beta}``.

Exit status is 0 exactly when every reported row passes.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

from .harness import ConfigError, csv_text, load_configs, run_all, verify_all_configs, write_csv
from .numerics import DomainError, alpha_residual, beta_deficit, check_lemma_suite, solve_alpha, solve_beta


def _summary(rows, out=sys.stdout) -> bool:
    ok = True
    for r in rows:
        ok &= r.passed
        mark = "PASS" if r.passed else "FAIL"
        print(f"{mark} {r.experiment:<26} n={r.n:<4} ratio={r.ratio:.6g} bound={r.bound:.6g} "
              f"margin={r.margin:+.3e}  {r.mechanism_descriptor}", file=out)
    return ok


def cmd_run(args) -> int:
    cfgs = load_configs(args.config)
    rows = run_all(cfgs)
    if args.out:
        write_csv(rows, args.out)
    elif not any(c.output for c in cfgs):
        sys.stdout.write(csv_text(rows))
    return 0 if _summary(rows, sys.stderr) else 1


def cmd_verify_all(args) -> int:
    t0 = time.perf_counter()
    rows = run_all(verify_all_configs(args.seed))
    path = os.path.join(args.out, "verify_all.csv")
    write_csv(rows, path)
    ok = _summary(rows)
    print(f"{sum(r.passed for r in rows)}/{len(rows)} rows pass; wrote {path} "
          f"in {time.perf_counter() - t0:.1f}s")
    return 0 if ok else 1


def cmd_lemmas(args) -> int:
    checks = check_lemma_suite(args.n)
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name:<18} margin={c.margin:+.6e}  {c.detail}")
    return 0 if all(c.passed for c in checks) else 1


def cmd_alpha(args) -> int:
    a = solve_alpha()
    print(f"alpha = {a:.15f}  (residual {alpha_residual(a):+.2e})")
    return 0


def cmd_beta(args) -> int:
    b = solve_beta(args.n)
    print(f"beta_{args.n} = {b:.15f}  (1/alpha - 1 - beta_n = {beta_deficit(args.n):.6e})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="delegation-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run the experiments in a JSON config")
    r.add_argument("config")
    r.add_argument("--out", help="write all rows to this CSV instead of per-experiment outputs")
    r.set_defaults(func=cmd_run)
    v = sub.add_parser("verify-all", help="run the full certification suite")
    v.add_argument("--seed", type=int, default=42)
    v.add_argument("--out", default="results")
    v.set_defaults(func=cmd_verify_all)
    le = sub.add_parser("lemmas", help="grid checks behind the curve rule")
    le.add_argument("--n", type=int, required=True)
    le.set_defaults(func=cmd_lemmas)
    a = sub.add_parser("alpha", help="print the limiting constant")
    a.set_defaults(func=cmd_alpha)
    b = sub.add_parser("beta", help="print beta_n")
    b.add_argument("--n", type=int, required=True)
    b.set_defaults(func=cmd_beta)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
