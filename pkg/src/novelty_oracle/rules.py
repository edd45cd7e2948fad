"""Prediction rules for sampling with novelty.

Every rule maps a partition of the sampling times seen so far to a
:class:`PredictiveDistribution` over the next draw: one entry per known
object (block, in order of appearance) and one for a novel object.

Arithmetic is generic: float parameters give IEEE doubles, while
``Fraction`` parameters (see :meth:`exact`) give exact rationals.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from pathlib import Path
from typing import Protocol, runtime_checkable

from .partitions import Partition, PartitionParseError, parse_partition

NORMALIZATION_TOL = 1e-12


class InvalidRuleError(ValueError):
    pass


class RuleSyntaxError(ValueError):
    pass


@dataclass(frozen=True)
class PredictiveDistribution:
    known: tuple
    novelty: object

    def probs(self) -> tuple:
        """Entries aligned with :func:`partitions.extensions` (novelty last)."""
        return self.known + (self.novelty,)

    def total(self):
        return sum(self.known) + self.novelty

    def cumulative(self) -> list:
        return list(accumulate(self.probs()))

    def to_json(self) -> dict:
        return {"known": [float(x) for x in self.known], "novelty": float(self.novelty)}


@runtime_checkable
class PredictionRule(Protocol):
    def predictive(self, p: Partition) -> PredictiveDistribution: ...

    def validate(self) -> None: ...


def _exact(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def _finite(name, x):
    if not math.isfinite(float(x)):
        raise InvalidRuleError(f"{name} must be finite, got {x}")


@dataclass(frozen=True)
class TwoParameter:
    """Discount/concentration rule: known ``(n_j - alpha)/(T + theta)``,
    novelty ``(alpha k + theta)/(T + theta)``."""

    alpha: float
    theta: float

    def validate(self) -> None:
        _finite("alpha", self.alpha)
        _finite("theta", self.theta)
        if not 0 <= self.alpha < 1:
            raise InvalidRuleError(f"alpha must satisfy 0 <= alpha < 1, got alpha={self.alpha}")
        if not self.theta > -self.alpha:
            raise InvalidRuleError(
                f"theta must satisfy theta > -alpha, got theta={self.theta}, alpha={self.alpha}"
            )

    def predictive(self, p: Partition) -> PredictiveDistribution:
        if p.T == 0:
            return PredictiveDistribution((), 1)
        a, th = self.alpha, self.theta
        denom = p.T + th
        known = tuple((n - a) / denom for n in p.block_sizes)
        return PredictiveDistribution(known, (a * p.k + th) / denom)

    def exact(self) -> "TwoParameter":
        return TwoParameter(_exact(self.alpha), _exact(self.theta))

    @property
    def literal(self) -> str:
        return f"two-param:alpha={_num(self.alpha)},theta={_num(self.theta)}"


@dataclass(frozen=True)
class Ewens:
    """One-parameter rule: known ``n_j/(T + theta)``, novelty ``theta/(T + theta)``."""

    theta: float

    def validate(self) -> None:
        _finite("theta", self.theta)
        if not self.theta > 0:
            raise InvalidRuleError(f"theta must satisfy theta > 0, got theta={self.theta}")

    def predictive(self, p: Partition) -> PredictiveDistribution:
        if p.T == 0:
            return PredictiveDistribution((), 1)
        denom = p.T + self.theta
        return PredictiveDistribution(tuple(n / denom for n in p.block_sizes), self.theta / denom)

    def exact(self) -> "Ewens":
        return Ewens(_exact(self.theta))

    @property
    def alpha(self):
        return 0

    @property
    def literal(self) -> str:
        return f"ewens:theta={_num(self.theta)}"


@dataclass(frozen=True)
class DeMorgan:
    """Ewens rule at theta = 1."""

    def validate(self) -> None:
        pass

    def predictive(self, p: Partition) -> PredictiveDistribution:
        return Ewens(1).predictive(p)

    def exact(self) -> "DeMorgan":
        return self

    @property
    def theta(self):
        return 1

    @property
    def alpha(self):
        return 0

    @property
    def literal(self) -> str:
        return "demorgan"


@dataclass(frozen=True)
class Kuipers:
    """Kuipers' rule.

    novelty = (k + delta/2)/(T + delta); known object j gets the remaining
    mass split as (n_j + lam/k)/(T + lam).  The within-known split uses
    ``T + lam`` as denominator so that the known entries add up to the
    known mass exactly.
    """

    lam: float
    delta: float

    def validate(self) -> None:
        _finite("lambda", self.lam)
        _finite("delta", self.delta)
        if not self.lam > 0:
            raise InvalidRuleError(f"lambda must satisfy lambda > 0, got lambda={self.lam}")
        if not self.delta > 0:
            raise InvalidRuleError(f"delta must satisfy delta > 0, got delta={self.delta}")

    def predictive(self, p: Partition) -> PredictiveDistribution:
        if p.T == 0:
            return PredictiveDistribution((), 1)
        T, k = p.T, p.k
        half = self.delta / 2
        denom = T + self.delta
        known_mass = (T - k + half) / denom
        share = self.lam / k
        known = tuple(known_mass * ((n + share) / (T + self.lam)) for n in p.block_sizes)
        return PredictiveDistribution(known, (k + half) / denom)

    def exact(self) -> "Kuipers":
        return Kuipers(_exact(self.lam), _exact(self.delta))

    @property
    def literal(self) -> str:
        return f"kuipers:lambda={_num(self.lam)},delta={_num(self.delta)}"


@dataclass(frozen=True)
class MixtureRule:
    """Predictive rule of a prior mixture of exchangeable rules.

    The mixture of partition-exchangeable measures is again exchangeable,
    but its predictive probabilities reweight the components by their
    posterior given the current partition, which is what makes ratio
    invariances break.  Components must expose ``alpha``/``theta``.
    """

    components: tuple
    weights: tuple

    def validate(self) -> None:
        if len(self.components) != len(self.weights) or not self.components:
            raise InvalidRuleError("mixture needs one positive weight per component")
        if any(not w > 0 for w in self.weights):
            raise InvalidRuleError("mixture weights must be positive")
        for c in self.components:
            validate(c)

    def predictive(self, p: Partition) -> PredictiveDistribution:
        from .measures import eppf_two_parameter

        if p.T == 0:
            return PredictiveDistribution((), 1)
        post = [w * eppf_two_parameter(c.alpha, c.theta, p) for c, w in zip(self.components, self.weights)]
        z = sum(post)
        dists = [c.predictive(p) for c in self.components]
        known = tuple(
            sum(pw * d.known[j] for pw, d in zip(post, dists)) / z for j in range(p.k)
        )
        novelty = sum(pw * d.novelty for pw, d in zip(post, dists)) / z
        return PredictiveDistribution(known, novelty)

    def exact(self) -> "MixtureRule":
        return MixtureRule(tuple(c.exact() for c in self.components), tuple(_exact(w) for w in self.weights))

    @property
    def literal(self) -> str:
        return "mixture(" + ";".join(f"{_num(w)}*{c.literal}" for c, w in zip(self.components, self.weights)) + ")"


@dataclass(frozen=True)
class TabulatedRule:
    """A rule given by an explicit table ``rgs -> (known..., novelty)``.

    Partitions missing from the table have no predictive distribution; the
    checkers only visit partitions up to :attr:`max_T`.
    """

    table: dict = field(hash=False)
    name: str = "table"

    @property
    def max_T(self) -> int:
        return max((len(r) for r in self.table), default=0)

    def validate(self) -> None:
        for rgs, probs in self.table.items():
            p = Partition(rgs)
            if len(probs) != p.k + 1:
                raise InvalidRuleError(
                    f"table entry {p.format_rgs() or '(empty)'} needs {p.k + 1} probabilities, got {len(probs)}"
                )
            if any(x < 0 for x in probs):
                raise InvalidRuleError(f"table entry {p.format_rgs()} has a negative probability")
            if abs(sum(probs) - 1) > NORMALIZATION_TOL:
                raise InvalidRuleError(f"table entry {p.format_rgs()} does not sum to 1")

    def predictive(self, p: Partition) -> PredictiveDistribution:
        if p.T == 0 and p.rgs not in self.table:
            return PredictiveDistribution((), 1)
        try:
            probs = self.table[p.rgs]
        except KeyError:
            raise InvalidRuleError(f"table has no entry for partition {p.format_rgs()}") from None
        return PredictiveDistribution(tuple(probs[:-1]), probs[-1])

    def exact(self) -> "TabulatedRule":
        return self

    @property
    def literal(self) -> str:
        return f"table:{self.name}"

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "rule": "table",
            "entries": {Partition(r).format_rgs(): [float(x) for x in v] for r, v in sorted(self.table.items())},
        }

    @classmethod
    def from_json(cls, data: dict, name: str = "table") -> "TabulatedRule":
        if data.get("rule") != "table" or "entries" not in data:
            raise RuleSyntaxError('table JSON needs {"rule": "table", "entries": {...}}')
        table = {}
        for key, probs in data["entries"].items():
            try:
                p = parse_partition(key)
            except PartitionParseError as e:
                raise RuleSyntaxError(f"bad table key {key!r}: {e}") from None
            table[p.rgs] = tuple(float(x) for x in probs)
        rule = cls(table, name)
        rule.validate()
        return rule

    @classmethod
    def load(cls, path) -> "TabulatedRule":
        path = Path(path)
        return cls.from_json(json.loads(path.read_text()), name=str(path))


def tabulate(rule, T_max: int) -> TabulatedRule:
    """Freeze a rule's predictive distributions for all partitions with T <= T_max."""
    from .partitions import EMPTY, enumerate_partitions

    table = {(): tuple(rule.predictive(EMPTY).probs())}
    for T in range(1, T_max + 1):
        for p in enumerate_partitions(T):
            table[p.rgs] = tuple(float(x) for x in rule.predictive(p).probs())
    return TabulatedRule(table, name=getattr(rule, "literal", "table"))


def validate(rule) -> None:
    """Raise :class:`InvalidRuleError` naming the violated bound."""
    if not isinstance(rule, PredictionRule):
        raise InvalidRuleError(f"{rule!r} does not implement the predictive interface")
    rule.validate()


def predictive(rule, p: Partition, exact: bool = False) -> PredictiveDistribution:
    validate(rule)
    if exact:
        rule = rule.exact()
    return rule.predictive(p)


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return repr(x)


_RULE_KEYS = {
    "two-param": ("alpha", "theta"),
    "ewens": ("theta",),
    "demorgan": (),
    "kuipers": ("lambda", "delta"),
}


def parse_rule(text: str):
    """Parse a rule literal such as ``"two-param:alpha=0.5,theta=1"``.

    ``"table:PATH"`` loads a :class:`TabulatedRule` from a JSON file.
    """
    s = text.strip()
    name, _, rest = s.partition(":")
    name = name.strip().lower()
    if name == "table":
        if not rest:
            raise RuleSyntaxError("table rule needs a path: table:FILE.json")
        return TabulatedRule.load(rest)
    if name not in _RULE_KEYS:
        raise RuleSyntaxError(f"unknown rule {name!r}; expected one of {', '.join(_RULE_KEYS)}, table")
    params = {}
    if rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            key = key.strip().lower()
            if not eq:
                raise RuleSyntaxError(f"expected key=value in {item!r}")
            if key not in _RULE_KEYS[name]:
                raise RuleSyntaxError(f"rule {name} has no parameter {key!r}")
            if key in params:
                raise RuleSyntaxError(f"parameter {key!r} given twice")
            try:
                params[key] = float(val)
            except ValueError:
                raise RuleSyntaxError(f"parameter {key}={val!r} is not a number") from None
    missing = [k for k in _RULE_KEYS[name] if k not in params]
    if missing:
        raise RuleSyntaxError(f"rule {name} is missing parameter(s): {', '.join(missing)}")
    if name == "two-param":
        rule = TwoParameter(params["alpha"], params["theta"])
    elif name == "ewens":
        rule = Ewens(params["theta"])
    elif name == "demorgan":
        rule = DeMorgan()
    else:
        rule = Kuipers(params["lambda"], params["delta"])
    validate(rule)
    return rule
