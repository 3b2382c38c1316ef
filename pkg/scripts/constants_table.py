"""Print beta_n, alpha_n and the gap to the limit for a range of n."""
import argparse

from delegation_lab.numerics import alpha_n, beta_deficit, solve_alpha, solve_beta


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="*", default=[3, 5, 10, 20, 50, 100, 200, 500])
    args = ap.parse_args()
    print(f"alpha = {solve_alpha():.15f}")
    print(f"{'n':>5} {'beta_n':>18} {'limit - beta_n':>15} {'alpha_n':>12}")
    for n in args.n:
        print(f"{n:>5} {solve_beta(n):>18.15f} {beta_deficit(n):>15.6e} {alpha_n(n):>12.8f}")


if __name__ == "__main__":
    main()
