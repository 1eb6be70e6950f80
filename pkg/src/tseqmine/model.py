"""Graphs, graph sequences, transformation rules and union graphs."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

#: Dummy label carried by deletion rules. Real labels are non-empty tokens.
ABSENT = ""

Edge = tuple[int, int]
Target = Union[int, Edge]


class Kind(enum.IntEnum):
    """The six unit edits. The integer value doubles as the rank in rule order."""

    VI = 0
    VD = 1
    VR = 2
    EI = 3
    ED = 4
    ER = 5

    @property
    def on_vertex(self) -> bool:
        return self <= Kind.VR

    @property
    def on_edge(self) -> bool:
        return self >= Kind.EI

    @property
    def is_deletion(self) -> bool:
        return self in (Kind.VD, Kind.ED)

    @classmethod
    def parse(cls, text: str) -> "Kind":
        try:
            return cls[text.upper()]
        except KeyError:
            raise ValueError(f"unknown rule kind {text!r}") from None

    def __str__(self) -> str:
        return self.name.lower()


def edge(u: int, v: int) -> Edge:
    """Normalized undirected edge key."""
    if u == v:
        raise ValueError(f"self-loop on vertex {u}")
    return (u, v) if u < v else (v, u)


class LabeledGraph:
    """Vertex- and edge-labeled simple undirected graph keyed by vertex id."""

    __slots__ = ("vertices", "edges")

    def __init__(self, vertices: Mapping[int, str] | None = None,
                 edges: Mapping[Edge, str] | None = None):
        self.vertices: dict[int, str] = dict(vertices or {})
        self.edges: dict[Edge, str] = {}
        for (u, v), lab in (edges or {}).items():
            e = edge(u, v)
            if u not in self.vertices or v not in self.vertices:
                raise ValueError(f"edge {e} has an endpoint that is not a vertex")
            self.edges[e] = lab

    def copy(self) -> "LabeledGraph":
        g = LabeledGraph()
        g.vertices = dict(self.vertices)
        g.edges = dict(self.edges)
        return g

    def degree(self, v: int) -> int:
        return sum(1 for e in self.edges if v in e)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return self.vertices == other.vertices and self.edges == other.edges

    def __repr__(self) -> str:
        return f"LabeledGraph(vertices={self.vertices}, edges={self.edges})"


@dataclass
class GraphSequence:
    gid: str
    interstates: list[LabeledGraph]

    def __post_init__(self):
        if not self.interstates:
            raise ValueError(f"graph sequence {self.gid!r} has no interstates")

    def __len__(self) -> int:
        return len(self.interstates)


@dataclass(frozen=True, order=True)
class TransformationRule:
    """One unit edit ``kind[target, label]`` at interstate ``j``, intrastate ``k``.

    Field order gives the default sort: by position first, which is the
    sequence order of a transformation sequence.
    """

    j: int
    k: int
    kind: Kind
    target: Target
    label: str = ABSENT

    def __post_init__(self):
        kind = Kind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind.on_vertex:
            if not isinstance(self.target, int):
                raise ValueError(f"{kind} needs a vertex target, got {self.target!r}")
        else:
            if not (isinstance(self.target, tuple) and len(self.target) == 2):
                raise ValueError(f"{kind} needs an edge target, got {self.target!r}")
            object.__setattr__(self, "target", edge(*self.target))
        if kind.is_deletion != (self.label == ABSENT):
            raise ValueError(f"{kind} rule has inconsistent label {self.label!r}")
        if self.j < 1 or self.k < 1:
            raise ValueError("interstate and intrastate indices start at 1")

    @property
    def vertices(self) -> tuple[int, ...]:
        return (self.target,) if isinstance(self.target, int) else self.target

    @property
    def key(self) -> tuple:
        """Position-free identity: kind, target, label."""
        return (self.kind, self.target, self.label)

    def relabeled(self, mapping: Mapping[int, int], j: int | None = None,
                  k: int | None = None) -> "TransformationRule":
        if isinstance(self.target, int):
            target: Target = mapping[self.target]
        else:
            target = edge(mapping[self.target[0]], mapping[self.target[1]])
        return TransformationRule(self.j if j is None else j,
                                  self.k if k is None else k,
                                  self.kind, target, self.label)

    def __str__(self) -> str:
        if isinstance(self.target, int):
            tgt = str(self.target)
        else:
            tgt = f"({self.target[0]},{self.target[1]})"
        lab = self.label if self.label != ABSENT else "•"
        return f"{self.kind}^({self.j},{self.k})[{tgt},{lab}]"


def tr(kind: str | Kind, j: int, k: int, target: Target,
       label: str = ABSENT) -> TransformationRule:
    """Shorthand constructor used heavily by fixtures and tests."""
    if isinstance(kind, str):
        kind = Kind.parse(kind)
    return TransformationRule(j, k, kind, target, label)


@dataclass(frozen=True)
class TransformationSequence:
    """Ordered rules; ``states`` is the number of interstate slots (data only)."""

    rules: tuple[TransformationRule, ...]
    states: int = 0
    is_pattern: bool = False

    def __post_init__(self):
        rules = tuple(self.rules)
        object.__setattr__(self, "rules", rules)
        for a, b in zip(rules, rules[1:]):
            if (a.j, a.k) >= (b.j, b.k):
                raise ValueError(f"rule positions not increasing at {a} -> {b}")
        top = rules[-1].j if rules else 0
        if self.states < top:
            object.__setattr__(self, "states", top)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, i):
        return self.rules[i]

    @property
    def interstates(self) -> list[int]:
        return sorted({r.j for r in self.rules})

    def vertex_ids(self) -> set[int]:
        return {v for r in self.rules for v in r.vertices}

    def __str__(self) -> str:
        return "<" + " ".join(str(r) for r in self.rules) + ">"


def pattern(rules: Iterable[TransformationRule]) -> TransformationSequence:
    """Build a pattern: interstates renumbered densely, intrastates by rule order."""
    rules = list(rules)
    dense = {j: i + 1 for i, j in enumerate(sorted({r.j for r in rules}))}
    grouped: dict[int, list[TransformationRule]] = {}
    for r in rules:
        grouped.setdefault(dense[r.j], []).append(r)
    out = []
    for j in sorted(grouped):
        seen = set()
        members = sorted(grouped[j], key=rule_order_key)
        for r in members:
            if r.key in seen:
                raise ValueError(f"duplicate rule {r} in one pattern interstate")
            seen.add(r.key)
        for k, r in enumerate(members, 1):
            out.append(TransformationRule(j, k, r.kind, r.target, r.label))
    return TransformationSequence(tuple(out), is_pattern=True)


def rule_order_key(r: TransformationRule) -> tuple:
    """Total order on rules of one pattern: interstate, kind rank, target, label."""
    tgt = (r.target, -1) if isinstance(r.target, int) else r.target
    return (r.j, int(r.kind), tgt, r.label)


@dataclass(frozen=True)
class UnionGraph:
    vertices: frozenset[int] = field(default_factory=frozenset)
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        return len(components(self.vertices, self.edges)) == 1


def components(vertices: Iterable[int], edges: Iterable[Edge]) -> list[set[int]]:
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups: dict[int, set[int]] = {}
    for v in parent:
        groups.setdefault(find(v), set()).add(v)
    return list(groups.values())


def union_graph_of_sequence(d: GraphSequence) -> UnionGraph:
    vs: set[int] = set()
    es: set[Edge] = set()
    for g in d.interstates:
        vs.update(g.vertices)
        es.update(g.edges)
    return UnionGraph(frozenset(vs), frozenset(es))


def union_graph_of_trs(s: Sequence[TransformationRule] | TransformationSequence) -> UnionGraph:
    vs: set[int] = set()
    es: set[Edge] = set()
    for r in s:
        vs.update(r.vertices)
        if not isinstance(r.target, int):
            es.add(r.target)
    return UnionGraph(frozenset(vs), frozenset(es))


def is_relevant(s: Sequence[TransformationRule] | TransformationSequence) -> bool:
    """True iff the union graph of ``s`` is connected."""
    if len(s) == 0:
        raise ValueError("relevancy is undefined for an empty sequence")
    return union_graph_of_trs(s).is_connected()
