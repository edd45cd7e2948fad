"""Command-line front end.

Exit codes: 0 ok / property holds, 1 internal error, 2 usage or input
error, 3 property check failed (witness on stdout).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings

from . import checkers
from .elicitation import (
    ElicitationObservation,
    UtilitySpec,
    elicit_ewens,
    elicit_two_parameter,
    fit_mle,
    load_observations,
    risk_neutral_bets,
)
from .lattice import DrawSequence, build_lattice
from .measures import induced_measure, partition_probability
from .partitions import enumerate_partitions, parse_partition
from .rules import parse_rule, validate
from .urn import SimulationConfig, simulate

SCHEMA_VERSION = 1
EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_FAILS = 0, 1, 2, 3


class UsageError(Exception):
    pass


def g(x) -> str:
    """12 significant digits."""
    if x is None:
        return "-"
    return f"{float(x):.12g}"


def num(x):
    return None if x is None else float(f"{float(x):.12g}")


def _emit_json(obj, out):
    out.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _doc(command: str, **body) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, **body}


def _table(rows, out):
    width = max((len(str(r[0])) for r in rows), default=0)
    for key, val in rows:
        out.write(f"{str(key).ljust(width)}  {val}\n")


def cmd_predict(args, out):
    rule, p = args.rule, args.partition
    d = rule.predictive(p)
    if args.format == "json":
        _emit_json(_doc("predict", rule=rule.literal, partition=p.to_json(),
                        known=[num(x) for x in d.known], novelty=num(d.novelty)), out)
        return EXIT_OK
    rows = [("rule", rule.literal), ("partition", p.format_rgs() or "(empty)"), ("T", p.T)]
    rows += [(f"object {j}", g(q)) for j, q in enumerate(d.known, start=1)]
    rows.append(("novelty", g(d.novelty)))
    _table(rows, out)
    return EXIT_OK


def cmd_eppf(args, out):
    w = partition_probability(args.rule, args.partition)
    if args.format == "json":
        _emit_json(_doc("eppf", rule=args.rule.literal, partition=args.partition.to_json(), prob=num(w)), out)
    else:
        out.write(g(w) + "\n")
    return EXIT_OK


def cmd_measure(args, out):
    mu = induced_measure(args.rule, args.T)
    if args.format == "json":
        _emit_json(_doc("measure", rule=args.rule.literal, T=args.T,
                        weights=[{"rgs": p.format_rgs(), "prob": num(w)} for p, w in mu.weights.items()]), out)
    elif args.format == "csv":
        w_csv = csv.writer(out, lineterminator="\n")
        w_csv.writerow(["rgs", "blocks", "prob"])
        for p, w in mu.weights.items():
            w_csv.writerow([p.format_rgs(), p.format_blocks(), g(w)])
    else:
        _table([(p.format_rgs(), g(w)) for p, w in mu.weights.items()], out)
    return EXIT_OK


def cmd_enumerate(args, out):
    parts = enumerate_partitions(args.T)
    if args.format == "json":
        _emit_json(_doc("enumerate", T=args.T, partitions=[p.to_json()["rgs"] for p in parts]), out)
    else:
        for p in parts:
            out.write((p.format_blocks() if args.style == "blocks" else p.format_rgs()) + "\n")
    return EXIT_OK


def cmd_check(args, out):
    report = checkers.run_check(args.rule, args.property, args.Tmax, tol=args.tol)
    if args.format == "json":
        d = report.to_json()
        d.pop("schema_version")
        if d["witness"] is not None:
            d["witness"]["values"] = [num(v) for v in d["witness"]["values"]]
        _emit_json(_doc("check", rule=args.rule.literal, **d), out)
    else:
        out.write(f"{report.property.value}: {report.verdict} (rule {args.rule.literal}, T_max {report.T_max})\n")
        w = report.witness
        if w is not None:
            for p in w.partitions:
                out.write(f"  partition {p.format_rgs()}  {p.format_blocks()}\n")
            if w.indices:
                out.write("  indices " + ",".join(str(i) for i in w.indices) + "\n")
            out.write(f"  {w.quantity} {g(w.values[0])} vs {g(w.values[1])}\n")
    return EXIT_OK if report.holds else EXIT_FAILS


def cmd_simulate(args, out):
    cfg = SimulationConfig(args.rule, args.T, args.reps, args.seed, exact=not args.no_exact)
    rep = simulate(cfg)
    if args.format == "json":
        d = rep.to_json()
        d.pop("schema_version")
        for row in d["rows"]:
            for key in ("exact_prob", "empirical_freq", "abs_dev"):
                row[key] = num(row[key])
        for key in ("max_abs_deviation", "chi_square", "novelty_count_mean"):
            d[key] = num(d[key])
        _emit_json(_doc("simulate", **d), out)
    elif args.format == "csv":
        out.write(rep.to_csv())
    else:
        _table([
            ("rule", args.rule.literal), ("T", args.T), ("replications", args.reps), ("seed", args.seed),
            ("max_abs_deviation", g(rep.max_abs_deviation)), ("chi_square", g(rep.chi_square)),
            ("novelty_count_mean", g(rep.novelty_count_mean)),
        ] + [(f"blocks={k}", c) for k, c in rep.novelty_count_histogram.items()], out)
    return EXIT_OK


def _utility(text: str) -> UtilitySpec:
    return UtilitySpec.linear() if text == "linear" else UtilitySpec.from_csv(text)


def cmd_elicit(args, out):
    u = _utility(args.utility)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if args.protocol == "two-param":
            if args.k is None:
                raise UsageError("--k is required for --protocol two-param")
            alpha, theta = elicit_two_parameter(u, ElicitationObservation(args.z, args.k, "two-param"))
        else:
            alpha, theta = 0.0, elicit_ewens(u, ElicitationObservation(args.z, None, "ewens"))
    for w in caught:
        sys.stderr.write(f"warning: {w.message}\n")
    if args.format == "json":
        _emit_json(_doc("elicit", protocol=args.protocol, alpha=num(alpha), theta=num(theta),
                        warnings=[str(w.message) for w in caught]), out)
    else:
        rows = [("alpha", g(alpha))] if args.protocol == "two-param" else []
        _table(rows + [("theta", g(theta))], out)
    return EXIT_OK


def cmd_bets(args, out):
    bets = risk_neutral_bets(args.rule, args.partition)
    if args.format == "json":
        _emit_json(_doc("bets", rule=args.rule.literal, partition=args.partition.to_json(),
                        bets=[{"event": b.event, "stake": num(b.stake), "amount": num(b.amount)} for b in bets]), out)
    else:
        _table([(b.event, f"stake {g(b.stake)} ~ {g(b.amount)}") for b in bets], out)
    return EXIT_OK


def cmd_fit(args, out):
    res = fit_mle(load_observations(args.data), family=args.family)
    if args.format == "json":
        d = res.to_json()
        d.pop("schema_version")
        for key in ("alpha", "theta", "log_likelihood"):
            d[key] = num(d[key])
        _emit_json(_doc("fit", **d), out)
    else:
        _table([("family", res.family), ("alpha", g(res.alpha)), ("theta", g(res.theta)),
                ("log_likelihood", g(res.log_likelihood)), ("evaluations", res.evaluations),
                ("converged", str(res.converged).lower()), ("at_boundary", str(res.at_boundary).lower())], out)
    return EXIT_OK


def cmd_lattice(args, out):
    lat = build_lattice(DrawSequence.parse(args.draws), args.rule)
    if args.format == "json":
        d = lat.to_json()
        d.pop("schema_version")
        for s in d["spaces"]:
            if s["predictive"] is not None:
                s["predictive"] = {k: num(v) for k, v in s["predictive"].items()}
        _emit_json(_doc("lattice", rule=args.rule.literal, draws=list(DrawSequence.parse(args.draws).labels), **d), out)
    elif args.format == "graph":
        out.write(lat.to_graph_text())
    else:
        for s in lat.spaces:
            head = f"{s.name}  [{s.origin}" + (f", t={s.time}" if s.time is not None else "") + "]"
            out.write(head + "\n")
            if s.predictive is not None:
                for key, q in s.predictive.items():
                    out.write(f"  P({key}) = {g(q)}\n")
        for a, b in lat.edges:
            out.write(f"edge {lat.space(a).name} -> {lat.space(b).name}\n")
    return EXIT_OK


def _rule_arg(text):
    try:
        return parse_rule(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _partition_arg(text):
    try:
        return parse_partition(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="novelty-oracle", description="Prediction rules for sampling with novelty.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help, formats=("table", "json")):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("--format", choices=formats, default=formats[0])
        return sp

    rule_help = 'e.g. "two-param:alpha=0.5,theta=1", "ewens:theta=2", "demorgan", "kuipers:lambda=2,delta=2", "table:FILE"'

    sp = add("predict", cmd_predict, "predictive distribution of the next draw")
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("--partition", type=_partition_arg, required=True)

    sp = add("eppf", cmd_eppf, "probability of a partition")
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("--partition", type=_partition_arg, required=True)

    sp = add("measure", cmd_measure, "exact measure over all partitions of {1..T}", ("table", "json", "csv"))
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("-T", type=_positive, required=True)

    sp = add("enumerate", cmd_enumerate, "list partitions of {1..T} in RGS order")
    sp.add_argument("-T", type=_positive, required=True)
    sp.add_argument("--style", choices=("rgs", "blocks"), default="rgs")

    sp = add("check", cmd_check, "verify or refute a property exhaustively")
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("--property", choices=checkers.PROPERTY_NAMES, required=True)
    sp.add_argument("--Tmax", type=_positive, required=True)
    sp.add_argument("--tol", type=float, default=checkers.DEFAULT_TOL)

    sp = add("simulate", cmd_simulate, "urn simulation against the exact measure", ("table", "json", "csv"))
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("-T", type=_positive, required=True)
    sp.add_argument("--reps", type=_positive, required=True)
    sp.add_argument("--seed", type=_seed, required=True)
    sp.add_argument("--no-exact", action="store_true", help="skip the exact comparison (no enumeration cap)")

    sp = add("elicit", cmd_elicit, "parameters from certainty equivalents")
    sp.add_argument("--protocol", choices=("two-param", "ewens"), required=True)
    sp.add_argument("--utility", default="linear", help='"linear" or a CSV file with columns x,u')
    sp.add_argument("--z", type=float, required=True)
    sp.add_argument("--k", type=float)

    sp = add("bets", cmd_bets, "risk-neutral indifference bets")
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("--partition", type=_partition_arg, required=True)

    sp = add("fit", cmd_fit, "maximum-likelihood fit from a file of partitions")
    sp.add_argument("--family", choices=("two-param", "ewens"), required=True)
    sp.add_argument("--data", required=True)

    sp = add("lattice", cmd_lattice, "awareness lattice for a draw sequence", ("text", "json", "graph"))
    sp.add_argument("--rule", type=_rule_arg, required=True, help=rule_help)
    sp.add_argument("--draws", required=True, help="comma-separated labels, e.g. r,b")
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    try:
        if getattr(args, "rule", None) is not None:
            validate(args.rule)
        return args.func(args, out)
    except (UsageError, ValueError, OSError) as e:
        sys.stderr.write(f"novelty-oracle {args.command}: error: {e}\n")
        return EXIT_USAGE
    except Exception as e:  # noqa: BLE001
        sys.stderr.write(f"novelty-oracle {args.command}: internal error: {type(e).__name__}: {e}\n")
        return EXIT_INTERNAL


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
