"""Expected number of distinct objects by time T, as plot-ready CSV.

    python3 scripts/novelty_curves.py --T 200 > curves.csv
"""
import argparse
import csv
import sys

from novelty_oracle import DeMorgan, Ewens, TwoParameter, expected_novelties

RULES = [DeMorgan(), Ewens(5.0), TwoParameter(0.25, 1.0), TwoParameter(0.5, 1.0), TwoParameter(0.75, 1.0)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, default=100)
    args = ap.parse_args()

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["T"] + [r.literal for r in RULES] + ["novelty_prob_" + r.literal for r in RULES])
    for T in range(1, args.T + 1):
        means = [expected_novelties(r, T) for r in RULES]
        # unconditional chance the draw at T + 1 is novel; linear in the block count
        nov = [(r.alpha * m + r.theta) / (T + r.theta) for r, m in zip(RULES, means)]
        w.writerow([T] + [f"{x:.12g}" for x in means + nov])


if __name__ == "__main__":
    main()
