"""Lattices of subjective state spaces generated by a labeled draw sequence.

A space is a set of object labels plus the novelty marker ``•``.  The
lattice contains the space after every realized prefix, the spaces one
step off each prefix (had a different object been drawn), and everything
generated from those by unions and intersections.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .partitions import Partition
from .rules import validate

NOVELTY = "•"


@dataclass(frozen=True)
class DrawSequence:
    labels: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        for x in labels:
            if not isinstance(x, str) or x == "" or x == NOVELTY:
                raise ValueError(f"object labels must be non-empty strings other than {NOVELTY!r}, got {x!r}")

    @classmethod
    def parse(cls, text: str) -> "DrawSequence":
        text = text.strip()
        return cls(tuple(x.strip() for x in text.split(","))) if text else cls(())


@dataclass
class AwarenessSpace:
    objects: frozenset
    order: tuple  # objects in order of first appearance
    origin: str  # "realized" | "counterfactual" | "closure"
    time: int | None = None  # prefix length the annotation refers to
    history: tuple = ()  # draw sequence behind the annotation
    predictive: dict | None = None  # label or NOVELTY -> probability

    @property
    def includes_novelty_marker(self) -> bool:
        return True

    @property
    def name(self) -> str:
        return "{" + ",".join(self.order + (NOVELTY,)) + "}"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "objects": list(self.order),
            "origin": self.origin,
            "time": self.time,
            "history": list(self.history),
            "predictive": None if self.predictive is None
            else {k: float(v) for k, v in self.predictive.items()},
        }


@dataclass
class AwarenessLattice:
    spaces: list  # AwarenessSpace, sorted by (size, label order)
    edges: list = field(default_factory=list)  # covering pairs (smaller, larger) as frozensets

    def space(self, objects) -> AwarenessSpace:
        key = frozenset(objects) - {NOVELTY}
        for s in self.spaces:
            if s.objects == key:
                return s
        raise KeyError(f"no space with objects {sorted(key)}")

    @property
    def bottom(self) -> AwarenessSpace:
        return self.spaces[0]

    @property
    def top(self) -> AwarenessSpace:
        return self.spaces[-1]

    def projection(self, from_space, to_space) -> dict:
        src, dst = _objs(from_space), _objs(to_space)
        if not dst <= src:
            raise ValueError(f"cannot project {_fmt(src)} onto {_fmt(dst)}: not a subspace")
        self.space(src), self.space(dst)
        out = {x: (x if x in dst else NOVELTY) for x in src}
        out[NOVELTY] = NOVELTY
        return out

    def project(self, from_space, to_space, element):
        mapping = self.projection(from_space, to_space)
        if element not in mapping:
            raise KeyError(f"{element!r} is not in space {_fmt(_objs(from_space))}")
        return mapping[element]

    def to_json(self) -> dict:
        names = {s.objects: s.name for s in self.spaces}
        return {
            "schema_version": 1,
            "spaces": [s.to_json() for s in self.spaces],
            "edges": [[names[a], names[b]] for a, b in self.edges],
            "projections": [
                {"from": names[b], "to": names[a], "map": self.projection(b, a)} for a, b in self.edges
            ],
        }

    def to_graph_text(self) -> str:
        """One covering edge per line: ``"{•}" -> "{r,•}"``."""
        names = {s.objects: s.name for s in self.spaces}
        return "".join(f'"{names[a]}" -> "{names[b]}"\n' for a, b in self.edges)


def _objs(space) -> frozenset:
    if isinstance(space, AwarenessSpace):
        return space.objects
    return frozenset(space) - {NOVELTY}


def _fmt(objs) -> str:
    return "{" + ",".join(sorted(objs) + [NOVELTY]) + "}"


def _annotate(rule, history: Sequence[str]) -> dict:
    p = Partition.from_labels(history)
    dist = rule.predictive(p)
    firsts: list[str] = []
    for x in history:
        if x not in firsts:
            firsts.append(x)
    out = {label: q for label, q in zip(firsts, dist.known)}
    out[NOVELTY] = dist.novelty
    return out


def build_lattice(draws, rule) -> AwarenessLattice:
    if not isinstance(draws, DrawSequence):
        draws = DrawSequence(tuple(draws))
    validate(rule)
    seq = draws.labels
    universe: list[str] = []
    for x in seq:
        if x not in universe:
            universe.append(x)
    rank = {x: i for i, x in enumerate(universe)}

    found: dict = {}

    def add(objs, origin, t=None, hist=None):
        objs = frozenset(objs)
        prev = found.get(objs)
        if prev is not None:
            # a realized annotation always wins; later prefixes replace earlier ones
            if origin == "realized" or (prev.origin == "closure" and origin == "counterfactual"):
                prev.origin, prev.time, prev.history = origin, t, tuple(hist)
                prev.predictive = _annotate(rule, hist)
            return
        space = AwarenessSpace(objs, tuple(sorted(objs, key=rank.get)), origin)
        if hist is not None:
            space.time, space.history = t, tuple(hist)
            space.predictive = _annotate(rule, hist)
        found[objs] = space

    for t in range(len(seq) + 1):
        prefix = seq[:t]
        add(prefix, "realized", t, prefix)
    for t in range(len(seq)):
        prefix = seq[:t]
        known = set(prefix)
        for x in universe:
            if x not in known:
                add(known | {x}, "counterfactual", t + 1, prefix + (x,))

    changed = True
    while changed:
        changed = False
        keys = list(found)
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                for c in (a | b, a & b):
                    if c not in found:
                        add(c, "closure")
                        changed = True

    spaces = sorted(found.values(), key=lambda s: (len(s.objects), [rank[x] for x in s.order]))
    edges = []
    for a in spaces:
        for b in spaces:
            if a.objects < b.objects and not any(
                a.objects < c.objects < b.objects for c in spaces
            ):
                edges.append((a.objects, b.objects))
    return AwarenessLattice(spaces, edges)
