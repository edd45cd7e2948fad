"""Sequential urn samplers and a harness comparing them with exact measures.

Randomness contract (fixed, so other implementations can replay streams):

* ``mix64(z)`` is the SplitMix64 finalizer.
* Replication ``i`` (0-based) of a run with ``base_seed`` uses the seed
  ``mix64(base_seed + (i + 1) * GAMMA)`` with ``GAMMA = 0x9E3779B97F4A7C15``.
* A seed initializes xoshiro256** with the first four SplitMix64 outputs
  ``mix64(seed + j * GAMMA)``, j = 1..4.
* Each draw consumes exactly one uniform ``(next() >> 11) * 2**-53``,
  including the first (forced novel) draw.
* The category is the first index whose cumulative probability exceeds the
  uniform; residual mass falls to the last category (novelty).

All arithmetic is modulo 2**64.
"""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import accumulate

import numpy as np

from .measures import PartitionMeasure, induced_measure
from .partitions import EMPTY, Partition, check_cap
from .rules import validate

MASK = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_TWO_M53 = 2.0 ** -53


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def replication_seed(base_seed: int, i: int) -> int:
    return mix64(base_seed + (i + 1) * GAMMA)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


class Xoshiro256:
    """xoshiro256** seeded through SplitMix64."""

    def __init__(self, seed: int):
        if not 0 <= seed <= MASK:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.s = [mix64(seed + j * GAMMA) for j in range(1, 5)]

    def next(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self) -> float:
        return (self.next() >> 11) * _TWO_M53


class _VecXoshiro:
    """The same generator for many seeds at once (numpy uint64 lanes)."""

    def __init__(self, seeds: np.ndarray):
        seeds = seeds.astype(np.uint64)
        self.s = [_vmix64(seeds + np.uint64(j) * np.uint64(GAMMA)) for j in range(1, 5)]

    def uniform(self) -> np.ndarray:
        s0, s1, s2, s3 = self.s
        result = _vrotl(s1 * np.uint64(5), 7) * np.uint64(9)
        t = s1 << np.uint64(17)
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _vrotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return (result >> np.uint64(11)).astype(np.float64) * _TWO_M53


def _vmix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _vrotl(x: np.ndarray, k: int) -> np.ndarray:
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


def _replication_seeds(base_seed: int, n: int) -> np.ndarray:
    i = np.arange(1, n + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _vmix64(np.uint64(base_seed) + i * np.uint64(GAMMA))


def _categorical(cum: list, u: float) -> int:
    for i, c in enumerate(cum):
        if u < c:
            return i
    return len(cum) - 1


def sample_partition(rule, T: int, seed: int) -> Partition:
    """Draw one partition of {1..T} by sequential seating."""
    validate(rule)
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    rng = Xoshiro256(seed)
    rgs: list[int] = []
    p = EMPTY
    for _ in range(T):
        cum = list(accumulate(rule.predictive(p).probs()))
        c = _categorical(cum, rng.uniform()) + 1
        rgs.append(c)
        p = Partition(tuple(rgs))
    return p


def sample_partitions(rule, T: int, replications: int, base_seed: int) -> list[Partition]:
    """Replications ``0..n-1`` of :func:`sample_partition`, vectorized.

    Replication ``i`` equals ``sample_partition(rule, T, replication_seed(base_seed, i))``.
    """
    nodes, state = _run(rule, T, replications, base_seed)
    return [nodes[s] for s in state]


def _run(rule, T, replications, base_seed):
    validate(rule)
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    if replications < 1:
        raise ValueError(f"replications must be >= 1, got {replications}")
    if not 0 <= base_seed <= MASK:
        raise ValueError(f"base_seed must be a 64-bit unsigned integer, got {base_seed}")
    with np.errstate(over="ignore"):
        rng = _VecXoshiro(_replication_seeds(base_seed, replications))
        nodes = [EMPTY]
        children: dict = {}
        state = np.zeros(replications, dtype=np.int64)
        for _ in range(T):
            u = rng.uniform()
            order = np.argsort(state, kind="stable")
            sorted_state = state[order]
            cuts = np.flatnonzero(np.diff(sorted_state)) + 1
            starts = np.concatenate(([0], cuts))
            ends = np.concatenate((cuts, [replications]))
            new_state = np.empty_like(state)
            for a, b in zip(starts, ends):
                sid = int(sorted_state[a])
                members = order[a:b]
                parent = nodes[sid]
                cum = np.array(list(accumulate(rule.predictive(parent).probs())), dtype=np.float64)
                choice = np.minimum(np.searchsorted(cum, u[members], side="right"), len(cum) - 1)
                for c in np.unique(choice):
                    key = (sid, int(c))
                    cid = children.get(key)
                    if cid is None:
                        cid = children[key] = len(nodes)
                        nodes.append(Partition(parent.rgs + (int(c) + 1,)))
                    new_state[members[choice == c]] = cid
            state = new_state
    return nodes, state


@dataclass
class SimulationConfig:
    rule: object
    T: int
    replications: int
    base_seed: int
    exact: bool = True

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")


@dataclass
class SimulationReport:
    config: SimulationConfig
    counts: dict  # Partition -> int
    empirical: PartitionMeasure
    exact: PartitionMeasure | None
    max_abs_deviation: float | None
    chi_square: float | None
    novelty_count_mean: float
    novelty_count_histogram: dict = field(default_factory=dict)

    def rows(self) -> list[tuple]:
        """(partition, exact_prob, empirical_freq, abs_dev) in RGS order."""
        keys = set(self.counts)
        if self.exact is not None:
            keys |= set(self.exact.weights)
        out = []
        for p in sorted(keys, key=lambda q: q.rgs):
            emp = self.empirical[p]
            ex = None if self.exact is None else float(self.exact[p])
            out.append((p, ex, emp, None if ex is None else abs(emp - ex)))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rgs", "exact_prob", "empirical_freq", "abs_dev"])
        for p, ex, emp, dev in self.rows():
            w.writerow([p.format_rgs(), _g(ex), _g(emp), _g(dev)])
        w.writerow(["summary", "", f"replications={self.config.replications}",
                    f"max_abs_deviation={_g(self.max_abs_deviation)};chi_square={_g(self.chi_square)};"
                    f"novelty_count_mean={_g(self.novelty_count_mean)}"])
        return buf.getvalue()

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "rule": getattr(self.config.rule, "literal", repr(self.config.rule)),
            "T": self.config.T,
            "replications": self.config.replications,
            "base_seed": self.config.base_seed,
            "rows": [
                {"rgs": p.format_rgs(), "exact_prob": ex, "empirical_freq": emp, "abs_dev": dev}
                for p, ex, emp, dev in self.rows()
            ],
            "max_abs_deviation": self.max_abs_deviation,
            "chi_square": self.chi_square,
            "novelty_count_mean": self.novelty_count_mean,
            "novelty_count_histogram": {str(k): v for k, v in self.novelty_count_histogram.items()},
        }


def _g(x) -> str:
    return "" if x is None else f"{x:.12g}"


def simulate(config: SimulationConfig, cap: int | None = None) -> SimulationReport:
    """Run the replications and compare with the exact induced measure."""
    rule, T, R = config.rule, config.T, config.replications
    if config.exact:
        check_cap(T, cap)
    nodes, state = _run(rule, T, R, config.base_seed)
    ids, n = np.unique(state, return_counts=True)
    counts = {nodes[int(i)]: int(c) for i, c in zip(ids, n)}
    counts = dict(sorted(counts.items(), key=lambda kv: kv[0].rgs))
    empirical = PartitionMeasure(T, {p: c / R for p, c in counts.items()})
    hist = Counter()
    for p, c in counts.items():
        hist[p.k] += c
    hist = dict(sorted(hist.items()))
    mean = sum(k * c for k, c in hist.items()) / R
    exact = dev = chi2 = None
    if config.exact:
        exact = induced_measure(rule, T, cap=cap)
        dev = 0.0
        chi2 = 0.0
        for p, w in exact.weights.items():
            obs = counts.get(p, 0)
            dev = max(dev, abs(obs / R - w))
            if w > 0:
                chi2 += (obs - R * w) ** 2 / (R * w)
        for p in counts:
            if exact[p] == 0:
                dev = max(dev, counts[p] / R)
                chi2 = math.inf
    return SimulationReport(config, counts, empirical, exact, dev, chi2, mean, hist)
