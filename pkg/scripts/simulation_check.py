"""Compare urn simulation with the exact measure for any rule.

    python3 scripts/simulation_check.py --rule demorgan -T 4 --reps 1000000 --seed 1
"""
import argparse

from novelty_oracle import SimulationConfig, parse_rule, simulate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rule", default="demorgan")
    ap.add_argument("-T", type=int, default=4)
    ap.add_argument("--reps", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--csv", action="store_true", help="per-partition rows instead of a summary")
    args = ap.parse_args()

    rep = simulate(SimulationConfig(parse_rule(args.rule), args.T, args.reps, args.seed))
    if args.csv:
        print(rep.to_csv(), end="")
        return
    print(f"partitions     {len(rep.exact)}")
    print(f"max |dev|      {rep.max_abs_deviation:.5f}")
    print(f"chi-square     {rep.chi_square:.2f} on {len(rep.exact) - 1} df")
    print(f"novelty mean   {rep.novelty_count_mean:.4f}")


if __name__ == "__main__":
    main()
