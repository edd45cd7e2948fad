"""Print the awareness lattice for draws r, b under a two-parameter rule.

    python3 scripts/two_draw_lattice.py --alpha 0.5 --theta 1
"""
import argparse
import json

from novelty_oracle import DrawSequence, TwoParameter, build_lattice


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--theta", type=float, default=1.0)
    ap.add_argument("--draws", default="r,b")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()

    lat = build_lattice(DrawSequence.parse(args.draws), TwoParameter(args.alpha, args.theta))
    if args.json:
        print(json.dumps(lat.to_json(), ensure_ascii=False, indent=2))
        return
    for s in lat.spaces:
        probs = "" if s.predictive is None else "  " + "  ".join(f"{k}:{v:.4f}" for k, v in s.predictive.items())
        print(f"{s.name:<14}{s.origin:<15}{probs}")
    print()
    print(lat.to_graph_text(), end="")


if __name__ == "__main__":
    main()
