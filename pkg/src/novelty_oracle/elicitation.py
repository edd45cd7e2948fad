"""Identify rule parameters from choice data, and fit them to partition data.

Elicitation works from certainty equivalents of two bets placed after the
history {{1},{2,3}}: ``z`` for "the 4th draw is novel" and ``k`` for "the
4th draw repeats object 1".  The Ewens protocol uses a single novelty bet
after {{1}}.
"""
from __future__ import annotations

import bisect
import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .partitions import Partition, parse_partition
from .rules import DeMorgan, Ewens, InvalidRuleError, Kuipers, TwoParameter, validate


class ElicitationError(ValueError):
    pass


class ElicitationRangeWarning(UserWarning):
    """Elicited parameters fall outside the model's admissible range."""


@dataclass(frozen=True)
class UtilitySpec:
    kind: str = "linear"  # "linear" | "table"
    table: tuple = ()  # ((x, u), ...) strictly increasing in both

    def __post_init__(self):
        if self.kind not in ("linear", "table"):
            raise ElicitationError(f"unknown utility kind {self.kind!r}")
        if self.kind == "table":
            tab = tuple((float(x), float(u)) for x, u in self.table)
            object.__setattr__(self, "table", tab)
            if len(tab) < 2:
                raise ElicitationError("utility table needs at least two knots")
            for (x0, u0), (x1, u1) in zip(tab, tab[1:]):
                if not (x1 > x0 and u1 > u0):
                    raise ElicitationError("utility table must be strictly increasing in x and u")
            if not (tab[0][0] <= 0 <= tab[-1][0] and tab[0][0] <= 1 <= tab[-1][0]):
                raise ElicitationError("utility table must cover x = 0 and x = 1")

    @classmethod
    def linear(cls) -> "UtilitySpec":
        return cls("linear")

    @classmethod
    def from_csv(cls, path) -> "UtilitySpec":
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"x", "u"} <= {f.strip() for f in reader.fieldnames}:
                raise ElicitationError(f"{path}: utility CSV needs columns x, u")
            rows = [({k.strip(): v for k, v in r.items()}) for r in reader]
        try:
            pairs = sorted((float(r["x"]), float(r["u"])) for r in rows)
        except ValueError as e:
            raise ElicitationError(f"{path}: {e}") from None
        return cls("table", tuple(pairs))

    def _raw(self, x: float) -> float:
        xs = [a for a, _ in self.table]
        if not xs[0] <= x <= xs[-1]:
            raise ElicitationError(f"x={x} outside utility table range [{xs[0]}, {xs[-1]}]")
        i = min(max(bisect.bisect_right(xs, x) - 1, 0), len(xs) - 2)
        (x0, u0), (x1, u1) = self.table[i], self.table[i + 1]
        return u0 + (u1 - u0) * (x - x0) / (x1 - x0)

    def u(self, x: float) -> float:
        """Utility normalized so that u(0) = 0."""
        if self.kind == "linear":
            return x
        return self._raw(x) - self._raw(0.0)

    def inverse(self, v: float) -> float:
        if self.kind == "linear":
            return v
        target = v + self._raw(0.0)
        us = [b for _, b in self.table]
        if not us[0] <= target <= us[-1]:
            raise ElicitationError(f"utility level {v} outside the table's range")
        i = min(max(bisect.bisect_right(us, target) - 1, 0), len(us) - 2)
        (x0, u0), (x1, u1) = self.table[i], self.table[i + 1]
        return x0 + (x1 - x0) * (target - u0) / (u1 - u0)


@dataclass(frozen=True)
class ElicitationObservation:
    z: float
    k: float | None = None
    protocol: str = "two-param"  # "two-param" | "ewens"


def _check_level(name, uv, u1):
    if not 0 < uv < u1:
        raise ElicitationError(f"need 0 < u({name}) < u(1); got u({name})={uv}, u(1)={u1}")


def elicit_two_parameter(u: UtilitySpec, obs: ElicitationObservation) -> tuple[float, float]:
    """(alpha, theta) from the two certainty equivalents.

    Out-of-range results are returned as computed, with an
    :class:`ElicitationRangeWarning`.
    """
    if obs.protocol != "two-param":
        raise ElicitationError(f"expected a two-param observation, got protocol {obs.protocol!r}")
    if obs.k is None:
        raise ElicitationError("two-param elicitation needs the repeat-bet certainty equivalent k")
    u1, uz, uk = u.u(1.0), u.u(obs.z), u.u(obs.k)
    _check_level("z", uz, u1)
    _check_level("k", uk, u1)
    denom = 2 * uk + uz - u1
    if denom == 0:
        raise ElicitationError("2u(k) + u(z) - u(1) = 0: the parameters are not identified")
    alpha = (3 * uk + uz - u1) / denom + 0.0
    theta = (2 * u1 - 6 * uk - 3 * uz) / denom + 0.0
    try:
        validate(TwoParameter(alpha, theta))
    except InvalidRuleError as e:
        warnings.warn(f"elicited parameters inconsistent with the model: {e}", ElicitationRangeWarning, stacklevel=2)
    return alpha, theta


def elicit_ewens(u: UtilitySpec, obs: ElicitationObservation) -> float:
    """theta = u(z) / (u(1) - u(z))."""
    if obs.protocol != "ewens":
        raise ElicitationError(f"expected an ewens observation, got protocol {obs.protocol!r}")
    u1, uz = u.u(1.0), u.u(obs.z)
    if uz == u1:
        raise ElicitationError("u(z) = u(1): theta is unbounded")
    theta = uz / (u1 - uz)
    if not theta > 0:
        warnings.warn(f"elicited theta={theta} is not positive", ElicitationRangeWarning, stacklevel=2)
    return theta


def certainty_equivalents(rule, u: UtilitySpec) -> ElicitationObservation:
    """The certainty equivalents a subject holding ``rule`` would report."""
    validate(rule)
    u1 = u.u(1.0)
    if isinstance(rule, TwoParameter):
        a, th = rule.alpha, rule.theta
        z = u.inverse(u1 * (2 * a + th) / (3 + th))
        k = u.inverse(u1 * (1 - a) / (3 + th))
        return ElicitationObservation(z, k, "two-param")
    if isinstance(rule, (Ewens, DeMorgan)):
        th = rule.theta
        return ElicitationObservation(u.inverse(u1 * th / (1 + th)), None, "ewens")
    raise ElicitationError(f"no elicitation protocol for {rule!r}")


@dataclass(frozen=True)
class Bet:
    event: str  # "novelty" or "object j"
    stake: float
    amount: float


def risk_neutral_bets(rule, p: Partition) -> list[Bet]:
    """Indifference pairs for a risk-neutral subject: a bet paying ``stake``
    on the event is worth ``amount`` for sure."""
    validate(rule)
    if isinstance(rule, Kuipers) or not isinstance(rule, (TwoParameter, Ewens, DeMorgan)):
        raise ElicitationError(f"risk-neutral bet pairs are not defined for {getattr(rule, 'literal', rule)!r}")
    if p.T < 1:
        raise ElicitationError("bets need a history with T >= 1")
    a, th = rule.alpha, rule.theta
    stake = p.T + th
    bets = [Bet("novelty", stake, a * p.k + th)]
    bets += [Bet(f"object {j}", stake, n - a) for j, n in enumerate(p.block_sizes, start=1)]
    return bets


@dataclass
class FitResult:
    alpha: float
    theta: float
    log_likelihood: float
    evaluations: int
    converged: bool
    at_boundary: bool = False
    family: str = "two-param"

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "family": self.family,
            "alpha": self.alpha,
            "theta": self.theta,
            "log_likelihood": self.log_likelihood,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "at_boundary": self.at_boundary,
        }


THETA_MAX = 1e4
ALPHA_MAX = 0.99
_GOLDEN = (math.sqrt(5) - 1) / 2


class _LogLik:
    """Sum of log EPPF over observations, reduced to term counts.

    log EPPF = sum_{i<k} log(theta + i alpha) - sum_{i<T} log(theta + i)
               + sum_j sum_{m<n_j} log(m - alpha)
    """

    def __init__(self, observations: Sequence[Partition]):
        T_top = max(p.T for p in observations)
        self.c_novel = np.zeros(T_top, dtype=np.int64)  # index i: count of (theta + i alpha)
        self.c_time = np.zeros(T_top, dtype=np.int64)  # index i: count of (theta + i)
        self.c_repeat = np.zeros(T_top, dtype=np.int64)  # index m: count of (m - alpha)
        for p in observations:
            self.c_novel[1 : p.k] += 1
            self.c_time[1 : p.T] += 1
            for n in p.block_sizes:
                self.c_repeat[1:n] += 1
        self.idx = np.arange(T_top, dtype=np.float64)
        self.evaluations = 0

    def __call__(self, alpha: float, theta: float) -> float:
        self.evaluations += 1
        i = self.idx
        nz = self.c_novel > 0
        tz = self.c_time > 0
        rz = self.c_repeat > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            val = (
                np.dot(self.c_novel[nz], np.log(theta + i[nz] * alpha))
                - np.dot(self.c_time[tz], np.log(theta + i[tz]))
                + np.dot(self.c_repeat[rz], np.log(i[rz] - alpha))
            )
        return float(val) if np.isfinite(val) else -math.inf

    @property
    def flat(self) -> bool:
        return not (self.c_novel.any() or self.c_time.any() or self.c_repeat.any())


def _golden_max(f, lo, hi, tol=1e-10, max_iter=200):
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _theta_floor(alpha: float) -> float:
    return max(-alpha, -ALPHA_MAX)


def _theta_grid(alpha: float, n: int = 240) -> np.ndarray:
    lo = _theta_floor(alpha) + 0.01
    # log-spaced offsets from lo - 1 reach lo at the bottom and THETA_MAX at the top
    return (lo - 1) + np.logspace(0, math.log10(THETA_MAX - lo + 1), n)


def load_observations(path) -> list[Partition]:
    """One partition per line (RGS or block form); ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            out.append(parse_partition(text))
        except ValueError as e:
            raise ElicitationError(f"{path}:{lineno}: {e}") from None
    return out


def fit_mle(observations: Sequence[Partition], family: str = "two-param", tol: float = 1e-6,
            max_rounds: int = 500) -> FitResult:
    """Maximum-likelihood (alpha, theta) from observed partitions.

    Coarse grid (alpha step 0.01 on [0, 0.99], log-spaced theta up to 1e4),
    then alternating golden-section refinement of each coordinate until the
    parameters move by less than ``tol``.
    """
    obs = list(observations)
    if not obs:
        raise ElicitationError("fit_mle needs at least one observation")
    if family not in ("two-param", "ewens"):
        raise ElicitationError(f"unknown family {family!r}; expected two-param or ewens")
    if any(p.T < 1 for p in obs):
        raise ElicitationError("observations must have T >= 1")
    ll = _LogLik(obs)

    alphas = np.round(np.arange(0, ALPHA_MAX + 1e-9, 0.01), 10) if family == "two-param" else np.array([0.0])
    best = (-math.inf, 0.0, 1.0)
    for a in alphas:
        for th in _theta_grid(a):
            v = ll(float(a), float(th))
            if v > best[0]:
                best = (v, float(a), float(th))
    if ll.flat:
        return FitResult(best[1], best[2], 0.0, ll.evaluations, False, False, family)

    _, alpha, theta = best
    a_step = 0.01
    converged = False
    for _ in range(max_rounds):
        old = (alpha, theta)
        if family == "two-param":
            a_lo = max(0.0, alpha - a_step, -theta + 1e-12)
            a_hi = min(1 - 1e-9, alpha + a_step)
            alpha, _ = _golden_max(lambda a: ll(a, theta), a_lo, a_hi)
        # refine theta on a log scale above its floor
        floor = -alpha
        s = math.log(theta - floor)
        s_lo = max(s - 0.1, math.log(1e-12))
        s_hi = min(s + 0.1, math.log(THETA_MAX - floor))
        s, _ = _golden_max(lambda x: ll(alpha, floor + math.exp(x)), s_lo, s_hi)
        theta = floor + math.exp(s)
        move = max(abs(alpha - old[0]), abs(theta - old[1]))
        if move < tol:
            converged = True
            break
    all_singletons = all(p.k == p.T for p in obs)
    at_boundary = all_singletons or theta >= 0.99 * THETA_MAX or alpha >= 1 - 1e-6
    if at_boundary:
        converged = False
    return FitResult(alpha, theta, ll(alpha, theta), ll.evaluations, converged, at_boundary, family)
