"""Exhaustive checkers for properties of prediction rules.

Each checker walks partitions in lexicographic order over (T, partition,
index tuple) and stops at the first counterexample, so witnesses are
deterministic.  Probabilities are compared relatively; ratios are compared
by cross-multiplication.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .measures import induced_measure
from .partitions import EMPTY, Partition, check_cap, enumerate_partitions, extensions, partition_vector
from .rules import validate

DEFAULT_TOL = 1e-9


class Property(str, enum.Enum):
    PartitionExchangeability = "PartitionExchangeability"
    MarginalConsistency = "MarginalConsistency"
    FreqDependenceKnown = "FreqDependenceKnown"
    FreqDependenceNovelty = "FreqDependenceNovelty"
    SamplingTimeDependenceNovelty = "SamplingTimeDependenceNovelty"
    ReverseBayes = "ReverseBayes"
    PlainBayes = "PlainBayes"
    ExtendedBayes = "ExtendedBayes"


@dataclass
class Witness:
    partitions: tuple[Partition, ...]
    values: tuple[float, float]
    indices: tuple[int, ...] = ()
    quantity: str = ""

    def to_json(self) -> dict:
        return {
            "partitions": [p.format_rgs() for p in self.partitions],
            "partitions_blocks": [p.format_blocks() for p in self.partitions],
            "indices": list(self.indices),
            "quantity": self.quantity,
            "values": [float(v) for v in self.values],
        }


@dataclass
class CheckReport:
    property: Property
    T_max: int
    verdict: str  # "holds" | "fails"
    tolerance: float = DEFAULT_TOL
    witness: Witness | None = None

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "property": self.property.value,
            "T_max": self.T_max,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def _close(a, b, tol) -> bool:
    return abs(a - b) <= tol * max(abs(a), abs(b))


def _ratios_equal(num1, den1, num2, den2, tol) -> bool:
    """num1/den1 == num2/den2, compared as num1*den2 vs num2*den1."""
    return _close(num1 * den2, num2 * den1, tol)


def _ratio(num, den):
    return float(num) / float(den) if den else float("inf")


class _Cache:
    def __init__(self, rule):
        self.rule = rule
        self._memo: dict = {}

    def __call__(self, p: Partition):
        d = self._memo.get(p.rgs)
        if d is None:
            d = self._memo[p.rgs] = self.rule.predictive(p)
        return d


def _setup(rule, T_max, cap):
    validate(rule)
    if T_max < 1:
        raise ValueError(f"T_max must be positive, got {T_max}")
    check_cap(T_max, cap)
    return _Cache(rule)


def _fail(prop, T_max, tol, **kw) -> CheckReport:
    return CheckReport(prop, T_max, "fails", tol, Witness(**kw))


def check_exchangeability(rule, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> CheckReport:
    """Equal partition vectors must get equal probability, both unconditionally
    and among the one-step extensions of a common prefix."""
    pred = _setup(rule, T_max, cap)
    prop = Property.PartitionExchangeability
    for T in range(1, T_max + 1):
        mu = induced_measure(rule, T, cap=cap)
        first: dict = {}
        for p, w in mu.weights.items():
            vec = partition_vector(p)
            if vec not in first:
                first[vec] = (p, w)
                continue
            q, v = first[vec]
            if not _close(v, w, tol):
                return _fail(prop, T_max, tol, partitions=(q, p), values=(v, w), quantity="weight")
        for parent in (enumerate_partitions(T - 1) if T > 1 else [EMPTY]):
            probs = pred(parent).probs()
            first = {}
            for j, child in enumerate(extensions(parent)):
                vec = partition_vector(child)
                if vec not in first:
                    first[vec] = (child, probs[j])
                    continue
                q, v = first[vec]
                if not _close(v, probs[j], tol):
                    return _fail(
                        prop, T_max, tol, partitions=(parent, q, child),
                        values=(v, probs[j]), quantity="conditional",
                    )
    return CheckReport(prop, T_max, "holds", tol)


def check_marginal_consistency(rule, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> CheckReport:
    """Each predictive sums to one, so the induced measures restrict consistently."""
    pred = _setup(rule, T_max, cap)
    prop = Property.MarginalConsistency
    for T in range(0, T_max):
        for p in (enumerate_partitions(T) if T else [EMPTY]):
            d = pred(p)
            tot = d.total()
            if any(x < 0 for x in d.probs()) or abs(tot - 1) > tol:
                return _fail(prop, T_max, tol, partitions=(p,), values=(tot, 1.0), quantity="predictive-total")
    return CheckReport(prop, T_max, "holds", tol)


def check_frequency_dependence(rule, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> dict:
    """Three reports: known-object probability a function of (n_j, T) only;
    novelty a function of (k, T) only; novelty a function of T only."""
    pred = _setup(rule, T_max, cap)
    known_first: dict = {}
    nov_first: dict = {}
    time_first: dict = {}
    out: dict = {}
    for T in range(1, T_max + 1):
        for p in enumerate_partitions(T, cap=cap):
            d = pred(p)
            if Property.FreqDependenceKnown not in out:
                for j, (n, q) in enumerate(zip(p.block_sizes, d.known), start=1):
                    key = (n, T)
                    if key not in known_first:
                        known_first[key] = (p, j, q)
                    elif not _close(known_first[key][2], q, tol):
                        p0, j0, q0 = known_first[key]
                        out[Property.FreqDependenceKnown] = _fail(
                            Property.FreqDependenceKnown, T_max, tol, partitions=(p0, p),
                            indices=(j0, j), values=(q0, q), quantity="known",
                        )
                        break
            for prop, table, key in (
                (Property.FreqDependenceNovelty, nov_first, (p.k, T)),
                (Property.SamplingTimeDependenceNovelty, time_first, T),
            ):
                if prop in out:
                    continue
                if key not in table:
                    table[key] = (p, d.novelty)
                elif not _close(table[key][1], d.novelty, tol):
                    p0, q0 = table[key]
                    out[prop] = _fail(prop, T_max, tol, partitions=(p0, p), values=(q0, d.novelty), quantity="novelty")
    for prop in (Property.FreqDependenceKnown, Property.FreqDependenceNovelty, Property.SamplingTimeDependenceNovelty):
        out.setdefault(prop, CheckReport(prop, T_max, "holds", tol))
    return {prop: out[prop] for prop in (
        Property.FreqDependenceKnown, Property.FreqDependenceNovelty, Property.SamplingTimeDependenceNovelty)}


def _ratio_check(rule, T_max, tol, cap, prop, successors: Callable, pairs: Callable, quantities: Callable):
    pred = _setup(rule, T_max, cap)
    for T in range(1, T_max):
        for p in enumerate_partitions(T, cap=cap):
            before = pred(p)
            for idx in pairs(p):
                for nxt in successors(p, idx):
                    after = pred(nxt)
                    n1, d1 = quantities(before, idx)
                    n2, d2 = quantities(after, idx)
                    if not _ratios_equal(n1, d1, n2, d2, tol):
                        return _fail(
                            prop, T_max, tol, partitions=(p, nxt), indices=idx,
                            values=(_ratio(n1, d1), _ratio(n2, d2)), quantity="ratio",
                        )
    return CheckReport(prop, T_max, "holds", tol)


def _known_pairs(p):
    return [(i, j) for i in range(1, p.k + 1) for j in range(i + 1, p.k + 1)]


def _known_ratio(d, idx):
    i, j = idx
    return d.known[i - 1], d.known[j - 1]


def check_reverse_bayes(rule, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> CheckReport:
    """p_i/p_j unchanged when a novel object is drawn next."""
    return _ratio_check(
        rule, T_max, tol, cap, Property.ReverseBayes,
        successors=lambda p, idx: [extensions(p)[-1]],
        pairs=_known_pairs, quantities=_known_ratio,
    )


def check_plain_bayes(rule, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> CheckReport:
    """p_i/p_j unchanged when a third known object m is drawn next."""
    return _ratio_check(
        rule, T_max, tol, cap, Property.PlainBayes,
        successors=lambda p, idx: [extensions(p)[m - 1] for m in range(1, p.k + 1) if m not in idx],
        pairs=_known_pairs, quantities=_known_ratio,
    )


def check_extended_bayes(rule, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> CheckReport:
    """novelty/p_i unchanged when a different known object j is drawn next."""
    return _ratio_check(
        rule, T_max, tol, cap, Property.ExtendedBayes,
        successors=lambda p, idx: [extensions(p)[j - 1] for j in range(1, p.k + 1) if j != idx[0]],
        pairs=lambda p: [(i,) for i in range(1, p.k + 1)],
        quantities=lambda d, idx: (d.novelty, d.known[idx[0] - 1]),
    )


CHECKS = {
    "exchangeability": check_exchangeability,
    "marginal": check_marginal_consistency,
    "reverse-bayes": check_reverse_bayes,
    "plain-bayes": check_plain_bayes,
    "extended-bayes": check_extended_bayes,
}

FREQUENCY_NAMES = {
    "freq-known": Property.FreqDependenceKnown,
    "freq-novelty": Property.FreqDependenceNovelty,
    "sampling-time": Property.SamplingTimeDependenceNovelty,
}

PROPERTY_NAMES = tuple(CHECKS) + tuple(FREQUENCY_NAMES)


def run_check(rule, name: str, T_max: int, tol: float = DEFAULT_TOL, cap: int | None = None) -> CheckReport:
    if name in CHECKS:
        return CHECKS[name](rule, T_max, tol=tol, cap=cap)
    if name in FREQUENCY_NAMES:
        return check_frequency_dependence(rule, T_max, tol=tol, cap=cap)[FREQUENCY_NAMES[name]]
    raise ValueError(f"unknown property {name!r}; expected one of {', '.join(PROPERTY_NAMES)}")
