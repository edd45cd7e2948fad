"""Exact probabilities of partitions and of novelty counts."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .partitions import EMPTY, Partition, check_cap, extensions, partition_vector, restrict
from .rules import DeMorgan, Ewens, InvalidRuleError, TwoParameter, validate


@dataclass
class PartitionMeasure:
    T: int
    weights: dict  # Partition -> probability, lexicographic RGS order

    def total(self):
        return sum(self.weights.values())

    def __getitem__(self, p: Partition):
        return self.weights.get(p, 0)

    def __len__(self):
        return len(self.weights)

    def marginal(self, T_prime: int) -> "PartitionMeasure":
        """Push the measure forward along restriction to the first T' times."""
        out: dict = defaultdict(int)
        for p, w in self.weights.items():
            out[restrict(p, T_prime)] += w
        return PartitionMeasure(T_prime, dict(sorted(out.items(), key=lambda kv: kv[0].rgs)))

    def by_block_count(self) -> dict[int, float]:
        out: dict = defaultdict(int)
        for p, w in self.weights.items():
            out[p.k] += w
        return dict(sorted(out.items()))

    def by_vector(self) -> dict[tuple, list]:
        out: dict = defaultdict(list)
        for p, w in self.weights.items():
            out[partition_vector(p)].append((p, w))
        return dict(out)

    def to_json(self) -> dict:
        return {
            "T": self.T,
            "weights": [{"rgs": p.format_rgs(), "prob": float(w)} for p, w in self.weights.items()],
        }


def rising_factorial(x, t: int, y=1):
    """``(x)_{t, y} = x (x + y) ... (x + (t-1) y)``; the empty product is 1."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    out = 1
    for i in range(t):
        out = out * (x + i * y)
    return out


def _two_param_check(alpha, theta):
    validate(TwoParameter(alpha, theta))


def eppf_two_parameter(alpha, theta, p: Partition):
    """Probability of partition ``p`` under the two-parameter rule."""
    _two_param_check(alpha, theta)
    if p.T == 0:
        return 1
    if isinstance(alpha, Fraction) or isinstance(theta, Fraction):
        return _eppf_sizes(alpha, theta, p.T, p.block_sizes)
    return _eppf_sizes_cached(alpha, theta, p.T, tuple(sorted(p.block_sizes)))


def _eppf_sizes(alpha, theta, T, sizes):
    k = len(sizes)
    num = rising_factorial(theta + alpha, k - 1, alpha)
    den = rising_factorial(theta + 1, T - 1, 1)
    prod = 1
    for n in sizes:
        prod = prod * rising_factorial(1 - alpha, n - 1, 1)
    return num / den * prod


@lru_cache(maxsize=1 << 16)
def _eppf_sizes_cached(alpha, theta, T, sizes):
    return _eppf_sizes(alpha, theta, T, sizes)


def eppf_ewens(theta, p: Partition):
    """Ewens sampling formula ``theta^k / (theta)_T * prod (n_j - 1)!``."""
    validate(Ewens(theta))
    if p.T == 0:
        return 1
    prod = 1
    for n in p.block_sizes:
        prod *= math.factorial(n - 1)
    return theta ** p.k / rising_factorial(theta, p.T, 1) * prod


def walk_tree(rule, T: int) -> Iterator[tuple[Partition, object]]:
    """Depth-first chain-rule weights of all partitions of {1..T}.

    Children are visited in extension order, which yields the partitions in
    lexicographic RGS order.
    """
    stack = [(EMPTY, 1)]
    while stack:
        p, w = stack.pop()
        if p.T == T:
            yield p, w
            continue
        probs = rule.predictive(p).probs()
        kids = extensions(p)
        for child, q in zip(reversed(kids), reversed(probs)):
            stack.append((child, w * q))


def induced_measure(rule, T: int, cap: int | None = None, exact: bool = False) -> PartitionMeasure:
    """Measure on partitions of {1..T} generated by ``rule`` via the chain rule."""
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    check_cap(T, cap)
    validate(rule)
    if exact:
        rule = rule.exact()
    return PartitionMeasure(T, dict(walk_tree(rule, T)))


_STIRLING_TABLES: dict = {}


def gen_stirling(alpha, T: int, k: int):
    """Generalized Stirling number ``S_alpha(T, k)`` by the triangular recurrence
    ``S(T+1, k) = S(T, k-1) + (T - k alpha) S(T, k)``."""
    if T < 1 or not 1 <= k <= T:
        raise ValueError(f"need 1 <= k <= T, got T={T}, k={k}")
    if not 0 <= alpha < 1:
        raise ValueError(f"alpha must satisfy 0 <= alpha < 1, got {alpha}")
    key = (type(alpha), alpha)
    rows = _STIRLING_TABLES.setdefault(key, [[0, 1]])  # row T=1: S(1,0)=0, S(1,1)=1
    while len(rows) < T:
        n = len(rows)
        prev = rows[-1]
        row = [0] * (n + 2)
        for j in range(1, n + 2):
            left = prev[j - 1]
            stay = prev[j] if j <= n else 0
            row[j] = left + (n - j * alpha) * stay
        rows.append(row)
    return rows[T - 1][k]


@lru_cache(maxsize=None)
def stirling_first_kind(T: int, k: int) -> int:
    """Unsigned Stirling number of the first kind (integer arithmetic)."""
    if T < 1 or not 1 <= k <= T:
        raise ValueError(f"need 1 <= k <= T, got T={T}, k={k}")
    row = [0, 1]
    for n in range(1, T):
        new = [0] * (n + 2)
        for j in range(1, n + 2):
            new[j] = row[j - 1] + (n * row[j] if j <= n else 0)
        row = new
    return row[k]


def _closed_form_params(rule):
    validate(rule)
    if isinstance(rule, (TwoParameter, Ewens, DeMorgan)):
        return rule.alpha, rule.theta
    raise InvalidRuleError(f"closed forms exist only for two-param/ewens/demorgan rules, not {rule!r}")


def prob_k_novelties(rule, T: int, k: int):
    """Probability that exactly ``k`` distinct objects have appeared by time T.

    Two-parameter form: ``(theta + alpha)_{k-1, alpha} / (theta + 1)_{T-1, 1} * S_alpha(T, k)``.
    """
    alpha, theta = _closed_form_params(rule)
    if T < 1 or not 1 <= k <= T:
        raise ValueError(f"need 1 <= k <= T, got T={T}, k={k}")
    if isinstance(rule, (Ewens, DeMorgan)):
        return theta ** k / rising_factorial(theta, T, 1) * stirling_first_kind(T, k)
    return (
        rising_factorial(theta + alpha, k - 1, alpha)
        / rising_factorial(theta + 1, T - 1, 1)
        * gen_stirling(alpha, T, k)
    )


def novelty_count_distribution(rule, T: int) -> dict[int, float]:
    return {k: prob_k_novelties(rule, T, k) for k in range(1, T + 1)}


def expected_novelties(rule, T: int):
    """Expected number of distinct objects seen by time T (closed form)."""
    alpha, theta = _closed_form_params(rule)
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    if isinstance(rule, (Ewens, DeMorgan)):
        return sum(theta / (theta + i - 1) for i in range(1, T + 1))
    total = 0
    ratio = 1  # (theta + alpha)_{i-1} / (theta + 1)_{i-1}
    for i in range(1, T + 1):
        total += ratio
        ratio = ratio * (theta + alpha + i - 1) / (theta + i)
    return total


def chain_rule_weight(rule, p: Partition, exact: bool = False):
    """Probability of ``p`` as the product of predictive probabilities along its path."""
    validate(rule)
    if exact:
        rule = rule.exact()
    w = 1
    for t in range(p.T):
        w = w * rule.predictive(restrict(p, t)).probs()[p.rgs[t] - 1]
    return w


def partition_probability(rule, p: Partition):
    """Closed-form EPPF for the exchangeable families, chain rule otherwise."""
    validate(rule)
    if isinstance(rule, (Ewens, DeMorgan)):
        return eppf_ewens(rule.theta, p)
    if isinstance(rule, TwoParameter):
        return eppf_two_parameter(rule.alpha, rule.theta, p)
    return chain_rule_weight(rule, p)
