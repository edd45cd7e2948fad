"""Partitions of sampling times {1..T} in restricted-growth (RGS) form.

A partition is stored as its assignment sequence ``c_1..c_T`` where block
labels are 1-based and numbered in order of first appearance.  The empty
partition (T = 0) stands for the history before anything has been drawn.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

DEFAULT_MAX_T = 12
CAP_ENV_VAR = "NOVELTY_ORACLE_MAX_T"


class PartitionParseError(ValueError):
    pass


class EnumerationCapError(ValueError):
    pass


def default_cap() -> int:
    """Enumeration cap, overridable through ``NOVELTY_ORACLE_MAX_T``."""
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_T
    try:
        cap = int(raw)
    except ValueError:
        raise EnumerationCapError(f"{CAP_ENV_VAR}={raw!r} is not an integer") from None
    if cap < 1:
        raise EnumerationCapError(f"{CAP_ENV_VAR} must be >= 1, got {cap}")
    return cap


def check_cap(T: int, cap: int | None = None) -> None:
    limit = default_cap() if cap is None else cap
    if T > limit:
        raise EnumerationCapError(
            f"T={T} exceeds the enumeration cap {limit}; "
            f"raise it to at least {T} (cap argument or {CAP_ENV_VAR})"
        )


@dataclass(frozen=True)
class Partition:
    rgs: tuple[int, ...]

    def __post_init__(self):
        rgs = tuple(self.rgs)
        object.__setattr__(self, "rgs", rgs)
        top = 0
        for pos, c in enumerate(rgs, start=1):
            if type(c) is not int or c < 1 or c > top + 1:
                raise PartitionParseError(
                    f"position {pos}: label {c!r} violates restricted growth "
                    f"(must be between 1 and {top + 1})"
                )
            top = max(top, c)

    @classmethod
    def from_blocks(cls, blocks: Sequence[Sequence[int]]) -> "Partition":
        """Build from blocks of 1-based times (any block order)."""
        owner: dict[int, int] = {}
        for b, block in enumerate(blocks):
            for t in block:
                if t in owner:
                    raise PartitionParseError(f"time {t} appears in more than one block")
                owner[t] = b
        T = len(owner)
        missing = [t for t in range(1, T + 1) if t not in owner]
        if missing:
            raise PartitionParseError(
                f"times must be contiguous 1..{T}; missing time {missing[0]}"
            )
        relabel: dict[int, int] = {}
        rgs = []
        for t in range(1, T + 1):
            b = owner[t]
            if b not in relabel:
                relabel[b] = len(relabel) + 1
            rgs.append(relabel[b])
        return cls(tuple(rgs))

    @classmethod
    def from_labels(cls, labels: Sequence) -> "Partition":
        """Partition of draw times induced by equality of object labels."""
        seen: dict = {}
        rgs = []
        for x in labels:
            if x not in seen:
                seen[x] = len(seen) + 1
            rgs.append(seen[x])
        return cls(tuple(rgs))

    @property
    def T(self) -> int:
        return len(self.rgs)

    @cached_property
    def k(self) -> int:
        """Number of blocks."""
        return max(self.rgs, default=0)

    @cached_property
    def block_sizes(self) -> tuple[int, ...]:
        sizes = [0] * self.k
        for c in self.rgs:
            sizes[c - 1] += 1
        return tuple(sizes)

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for t, c in enumerate(self.rgs, start=1):
            out[c - 1].append(t)
        return tuple(tuple(b) for b in out)

    def format_rgs(self) -> str:
        return ",".join(str(c) for c in self.rgs)

    def format_blocks(self) -> str:
        return "".join("{" + ",".join(str(t) for t in b) + "}" for b in self.blocks)

    def to_json(self) -> dict:
        return {"T": self.T, "rgs": list(self.rgs)}

    def __str__(self) -> str:
        return self.format_rgs()


EMPTY = Partition(())

_BLOCK_RE = re.compile(r"\{([^{}]*)\}")


def parse_partition(text: str) -> Partition:
    """Parse either ``"1,1,2"`` (RGS) or ``"{1,2}{3}"`` (blocks)."""
    s = text.strip()
    if s == "" or s in ("{}", "()", "empty"):
        return EMPTY
    if s.startswith("{"):
        compact = re.sub(r"\s+", "", s)
        blocks = []
        pos = 0
        for m in _BLOCK_RE.finditer(compact):
            if m.start() != pos:
                raise PartitionParseError(f"malformed block text near character {pos + 1}")
            pos = m.end()
            body = m.group(1)
            if body == "":
                raise PartitionParseError(f"empty block at character {m.start() + 1}")
            try:
                times = [int(x) for x in body.split(",")]
            except ValueError:
                raise PartitionParseError(f"non-integer time in block {{{body}}}") from None
            if any(t < 1 for t in times):
                raise PartitionParseError(f"times must be >= 1 in block {{{body}}}")
            if times != sorted(set(times)):
                raise PartitionParseError(f"block {{{body}}} must list ascending distinct times")
            blocks.append(times)
        if pos != len(compact):
            raise PartitionParseError(f"malformed block text near character {pos + 1}")
        firsts = [b[0] for b in blocks]
        if firsts != sorted(firsts):
            raise PartitionParseError("blocks must be listed in order of first appearance")
        return Partition.from_blocks(blocks)
    parts = [x.strip() for x in s.split(",")]
    try:
        labels = tuple(int(x) for x in parts)
    except ValueError:
        bad = next(i for i, x in enumerate(parts, start=1) if not x.lstrip("-").isdigit())
        raise PartitionParseError(f"position {bad}: {parts[bad - 1]!r} is not an integer") from None
    return Partition(labels)


def restrict(p: Partition, T_prime: int) -> Partition:
    if not 0 <= T_prime <= p.T:
        raise ValueError(f"restriction length {T_prime} outside 0..{p.T}")
    if T_prime == p.T:
        return p
    return Partition(p.rgs[:T_prime])


def partition_vector(p: Partition) -> tuple[int, ...]:
    """``a_i`` = number of blocks of size ``i``, for i = 1..T."""
    a = [0] * p.T
    for n in p.block_sizes:
        a[n - 1] += 1
    return tuple(a)


def extensions(p: Partition) -> list[Partition]:
    """One-step successors: T+1 joins block 1..k, then the novelty extension."""
    return [Partition(p.rgs + (c,)) for c in range(1, p.k + 2)]


def is_prefix(small: Partition, big: Partition) -> bool:
    return small.T <= big.T and big.rgs[: small.T] == small.rgs


def enumerate_partitions(T: int, cap: int | None = None) -> Iterator[Partition]:
    """All partitions of {1..T} in lexicographic RGS order."""
    if T < 1:
        raise ValueError(f"T must be positive, got {T}")
    check_cap(T, cap)
    for rgs in _rgs_lex(T):
        yield Partition(rgs)


def _rgs_lex(T: int) -> Iterator[tuple[int, ...]]:
    a = [1] * T
    # prefix maxima: m[i] = max(a[0..i])
    m = [1] * T
    while True:
        yield tuple(a)
        i = T - 1
        while i > 0 and a[i] > m[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, T):
            a[j] = 1
            m[j] = m[i]


def bell_number(T: int) -> int:
    """Bell number via the Bell triangle."""
    row = [1]
    for _ in range(T - 1):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
    return row[-1] if T >= 1 else 1
