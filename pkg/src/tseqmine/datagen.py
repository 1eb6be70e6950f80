"""Synthetic graph-sequence databases with planted patterns.

Each sequence starts from a random graph on about half its vertex budget and
then receives ``d_ist`` random edits per transition (insert with probability
``p_i``, delete with ``p_d``, relabel otherwise, each on a vertex or an edge)
until it has used its vertex budget and its union graph is connected.
Planted patterns are grown the same way on a smaller budget and compiled.
Each database sequence is grown around one planted pattern, which sits on its
own vertex ids and is never edited by the host, so it stays contained.

Every sequence draws from its own ``random.Random`` seeded by a string derived
from the master seed, so output is reproducible and order independent.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, fields
from typing import Iterator

from .compiler import compile_sequence
from .model import (GraphSequence, LabeledGraph, TransformationSequence,
                    components, edge, pattern)

RNG_VERSION = "tseqmine-datagen/1 python-mt19937 str-seed"


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GeneratorConfig:
    p_i: float = 0.8
    p_d: float = 0.1
    v_avg: float = 6
    v_embed_avg: float = 3
    n_labels_v: int = 5
    n_labels_e: int = 5
    n_embedded: int = 10
    db_size: int = 1000
    p_edge: float = 0.15
    d_ist: int = 2
    seed: int = 0
    max_transitions: int = 500
    max_resample: int = 200

    def __post_init__(self):
        for name in ("p_i", "p_d", "p_edge"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.p_i + self.p_d > 1 + 1e-12:
            raise ValueError("p_i + p_d must not exceed 1")
        for name in ("v_avg", "v_embed_avg", "n_labels_v", "n_labels_e",
                     "n_embedded", "db_size", "d_ist"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")

    def header(self) -> str:
        params = " ".join(f"{f.name}={getattr(self, f.name)}" for f in fields(self))
        return f"# {RNG_VERSION}\n# {params}\n"


def _labels(n: int, upper: bool) -> list[str]:
    base = "ABCDEFGHIJKLMNOPQRSTUVWXYZ" if upper else "abcdefghijklmnopqrstuvwxyz"
    if n <= len(base):
        return list(base[:n])
    return [f"{base[0]}{i}" for i in range(n)]


def poisson_at_least_one(rng: random.Random, mean: float) -> int:
    """Poisson draw (Knuth) floored at 1."""
    limit = math.exp(-mean)
    k, p = 0, 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return max(1, k)
        k += 1


class _Walker:
    """State of one growing sequence, optionally around a planted graph sequence.

    Planted vertices and edges are frozen: they follow the planted sequence
    and the walker never edits them. The walker may connect its own vertices
    to planted vertices that survive to the planted sequence's end, so the
    planted deletions stay applicable.
    """

    def __init__(self, cfg: GeneratorConfig, rng: random.Random, budget: int,
                 planted: GraphSequence | None = None, offset: int = 0):
        self.cfg = cfg
        self.rng = rng
        self.budget = budget
        self.vlab = _labels(cfg.n_labels_v, True)
        self.elab = _labels(cfg.n_labels_e, False)
        self.next_id = 0
        self.union_v: set[int] = set()
        self.union_e: set[tuple[int, int]] = set()
        self.offset = offset
        self.planted: list[LabeledGraph] = []
        if planted is not None:
            for p in planted.interstates:
                q = LabeledGraph({v + budget: lab for v, lab in p.vertices.items()},
                                 {edge(a + budget, b + budget): lab for (a, b), lab in p.edges.items()})
                self.planted.append(q)
        self.frozen = {v for p in self.planted for v in p.vertices}
        self.safe = set(self.planted[-1].vertices) if self.planted else set()
        g = LabeledGraph()
        own = max(1, round(budget / 2)) if budget else 0
        for _ in range(own):
            self._new_vertex(g)
        vs = sorted(g.vertices)
        for i, a in enumerate(vs):
            for b in vs[i + 1:]:
                if rng.random() < cfg.p_edge:
                    g.edges[(a, b)] = rng.choice(self.elab)
        self.graphs = [g]
        self._lay_planted(g, 0)
        self._note(g)

    def _planted_at(self, t: int) -> LabeledGraph | None:
        if not self.planted or t < self.offset:
            return None
        return self.planted[min(t - self.offset, len(self.planted) - 1)]

    def _lay_planted(self, g: LabeledGraph, t: int):
        """Bring the planted part of ``g`` to its state at interstate ``t``."""
        p = self._planted_at(t)
        if p is None:
            return
        for e in [e for e in g.edges if e[0] in self.frozen and e[1] in self.frozen]:
            if e not in p.edges:
                del g.edges[e]
        for v in [v for v in g.vertices if v in self.frozen]:
            if v not in p.vertices:
                del g.vertices[v]
        g.vertices.update(p.vertices)
        g.edges.update(p.edges)

    def _note(self, g: LabeledGraph):
        self.union_v.update(g.vertices)
        self.union_e.update(g.edges)

    def _new_vertex(self, g):
        v = self.next_id
        self.next_id += 1
        g.vertices[v] = self.rng.choice(self.vlab)
        self.union_v.add(v)
        return v

    def done(self) -> bool:
        return (self.next_id >= self.budget
                and len(self.graphs) >= self.offset + len(self.planted)
                and len(components(self.union_v, self.union_e)) == 1)

    def _own_edge(self, e) -> bool:
        return not (e[0] in self.frozen and e[1] in self.frozen)

    def _try_edit(self, g: LabeledGraph, touched: set) -> bool:
        rng, cfg = self.rng, self.cfg
        r = rng.random()
        on_vertex = rng.random() < 0.5
        own_vertices = [v for v in g.vertices if v not in self.frozen]
        if r < cfg.p_i:
            if on_vertex and self.next_id < self.budget:
                touched.add(self._new_vertex(g))
                return True
            ends = sorted(own_vertices + [v for v in g.vertices if v in self.safe])
            free = [(a, b) for i, a in enumerate(ends) for b in ends[i + 1:]
                    if (a, b) not in g.edges and (a, b) not in touched and self._own_edge((a, b))]
            if not free:
                return False
            e = rng.choice(free)
            g.edges[e] = rng.choice(self.elab)
            self.union_e.add(e)
            touched.add(e)
            return True
        if r < cfg.p_i + cfg.p_d:
            if on_vertex:
                comps = components(self.union_v, self.union_e)
                comp_of = {v: i for i, c in enumerate(comps) for v in c}
                live: dict[int, int] = {}
                for v in g.vertices:
                    live[comp_of[v]] = live.get(comp_of[v], 0) + 1
                # keep one own vertex alive and one live vertex per union component,
                # otherwise no edit or no connecting edge may remain possible
                cands = [v for v in own_vertices
                         if v not in touched and g.degree(v) == 0 and live[comp_of[v]] > 1]
                if len(own_vertices) < 2:
                    cands = []
                if not cands:
                    return False
                v = rng.choice(sorted(cands))
                del g.vertices[v]
                touched.add(v)
                return True
            cands = [e for e in g.edges if e not in touched and self._own_edge(e)]
            if not cands:
                return False
            e = rng.choice(sorted(cands))
            del g.edges[e]
            touched.add(e)
            return True
        if on_vertex:
            cands = [v for v in own_vertices if v not in touched]
            labels = self.vlab
            table = g.vertices
        else:
            cands = [e for e in g.edges if e not in touched and self._own_edge(e)]
            labels = self.elab
            table = g.edges
        if not cands or len(labels) < 2:
            return False
        x = rng.choice(sorted(cands))
        table[x] = rng.choice([lab for lab in labels if lab != table[x]])
        touched.add(x)
        return True

    def step(self):
        g = self.graphs[-1].copy()
        self._lay_planted(g, len(self.graphs))
        self._note(g)
        touched: set = set()
        # a sequence that is only its planted pattern has nothing of its own to edit
        wanted = self.cfg.d_ist if self.budget else 0
        made = 0
        for _ in range(wanted):
            for _ in range(self.cfg.max_resample):
                if self._try_edit(g, touched):
                    made += 1
                    break
        # one element takes one edit per transition, so a tiny graph may not
        # offer d_ist distinct edits; settle for what it offers, but not nothing.
        # A saturated host may still ride along while the planted part changes,
        # and a host stuck before the planted part starts brings that start forward.
        if wanted and not made and g == self.graphs[-1] and len(self.graphs) < self.offset:
            self.offset = len(self.graphs)
            self._lay_planted(g, len(self.graphs))
            self._note(g)
        if wanted and not made and g == self.graphs[-1]:
            raise GenerationError("no applicable edit within the resample budget")
        self.graphs.append(g)

    def run(self, gid: str) -> GraphSequence:
        while not self.done():
            if len(self.graphs) > self.cfg.max_transitions:
                raise GenerationError(f"sequence {gid} did not become relevant")
            self.step()
        return GraphSequence(gid, self.graphs)


def grow_sequence(cfg: GeneratorConfig, rng: random.Random, budget: int, gid: str,
                  planted: GraphSequence | None = None, offset: int = 0) -> GraphSequence:
    return _Walker(cfg, rng, budget, planted, offset).run(gid)


def planted_patterns(cfg: GeneratorConfig) -> list[tuple[GraphSequence, TransformationSequence]]:
    out = []
    for i in range(cfg.n_embedded):
        rng = random.Random(f"{cfg.seed}:planted:{i}")
        g = grow_sequence(cfg, rng, poisson_at_least_one(rng, cfg.v_embed_avg), f"p{i}")
        out.append((g, pattern(compile_sequence(g))))
    return out


def host_sequence(cfg: GeneratorConfig, i: int, planted) -> GraphSequence:
    """Sequence ``i``: one planted pattern, chosen uniformly, with a host grown around it.

    The vertex budget covers the planted vertices, so hosts average ``v_avg``
    ids unless the planted pattern alone is larger. With no host vertices the
    pattern starts at the first interstate; otherwise at offset 0, 1 or 2.
    """
    rng = random.Random(f"{cfg.seed}:host:{i}")
    target = poisson_at_least_one(rng, cfg.v_avg)
    pg, _ = planted[rng.randrange(len(planted))]
    n_planted = len({v for g in pg.interstates for v in g.vertices})
    budget = max(0, target - n_planted)
    offset = rng.randrange(3) if budget else 0
    return grow_sequence(cfg, rng, budget, f"g{i}", pg, offset)


def iter_database(cfg: GeneratorConfig, planted) -> Iterator[GraphSequence]:
    for i in range(cfg.db_size):
        yield host_sequence(cfg, i, planted)


def generate(cfg: GeneratorConfig) -> tuple[list[GraphSequence], list[TransformationSequence]]:
    """The database and the planted patterns (as pattern transformation sequences)."""
    planted = planted_patterns(cfg)
    return list(iter_database(cfg, planted)), [p for _, p in planted]
