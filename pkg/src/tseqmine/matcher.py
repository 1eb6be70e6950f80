"""Inclusion of a pattern in a data transformation sequence.

A pattern ``s_p`` is contained in ``s_d`` when an order-preserving injection
``phi`` of pattern interstates into data interstates and an injection ``psi`` of
pattern vertices into data vertices map every pattern rule onto a data rule of
the same kind and label inside interstate ``phi(j)``. The intrastate position
of the data rule is free.
"""
from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple, Sequence

from .model import TransformationRule, TransformationSequence, edge


class Embedding(NamedTuple):
    phi: tuple[int, ...]
    psi: tuple[tuple[int, int], ...]

    @property
    def psi_map(self) -> dict[int, int]:
        return dict(self.psi)


class DataIndex:
    """Per-interstate lookup tables over one data sequence."""

    __slots__ = ("states", "rules", "at", "vertex_rules", "edge_rules", "adj")

    def __init__(self, s: TransformationSequence):
        self.states = s.states
        self.rules = s.rules
        self.at: list[dict[tuple, set]] = [dict() for _ in range(s.states + 1)]
        self.vertex_rules: dict[int, list[TransformationRule]] = {}
        self.edge_rules: dict[tuple[int, int], list[TransformationRule]] = {}
        self.adj: dict[int, list[tuple[int, TransformationRule]]] = {}
        for r in s:
            self.at[r.j].setdefault((r.kind, r.label), set()).add(r.target)
            if isinstance(r.target, int):
                self.vertex_rules.setdefault(r.target, []).append(r)
            else:
                a, b = r.target
                self.edge_rules.setdefault(r.target, []).append(r)
                self.adj.setdefault(a, []).append((b, r))
                self.adj.setdefault(b, []).append((a, r))


def _groups(s_p: Sequence[TransformationRule]) -> list[list[TransformationRule]]:
    groups: dict[int, list[TransformationRule]] = {}
    for r in s_p:
        groups.setdefault(r.j, []).append(r)
    return [groups[j] for j in sorted(groups)]


def iter_embeddings(s_p: Sequence[TransformationRule], data: DataIndex | TransformationSequence
                    ) -> Iterator[Embedding]:
    """Yield every distinct (phi, psi) witnessing ``s_p`` in the data sequence."""
    idx = data if isinstance(data, DataIndex) else DataIndex(data)
    groups = _groups(s_p)
    n, m = len(groups), idx.states
    psi: dict[int, int] = {}
    used: set[int] = set()
    phi: list[int] = []

    def match_rules(rules, pos, jd):
        if pos == len(rules):
            yield None
            return
        r = rules[pos]
        cands = idx.at[jd].get((r.kind, r.label))
        if not cands:
            return
        if isinstance(r.target, int):
            u = r.target
            if u in psi:
                if psi[u] in cands:
                    yield from match_rules(rules, pos + 1, jd)
                return
            for x in sorted(cands):
                if x in used:
                    continue
                psi[u] = x
                used.add(x)
                yield from match_rules(rules, pos + 1, jd)
                del psi[u]
                used.discard(x)
            return
        u, v = r.target
        pu, pv = psi.get(u), psi.get(v)
        if pu is not None and pv is not None:
            if edge(pu, pv) in cands:
                yield from match_rules(rules, pos + 1, jd)
            return
        for a, b in sorted(cands):
            for x, y in ((a, b), (b, a)):
                if (pu is not None and pu != x) or (pv is not None and pv != y):
                    continue
                new = [(w, z) for w, z in ((u, x), (v, y)) if w not in psi]
                if any(z in used for _, z in new):
                    continue
                for w, z in new:
                    psi[w] = z
                    used.add(z)
                yield from match_rules(rules, pos + 1, jd)
                for w, z in new:
                    del psi[w]
                    used.discard(z)

    def rec(i, prev):
        if i == n:
            yield Embedding(tuple(phi), tuple(sorted(psi.items())))
            return
        # leave room for the remaining pattern interstates
        for jd in range(prev + 1, m - (n - i - 1) + 1):
            phi.append(jd)
            for _ in match_rules(groups[i], 0, jd):
                yield from rec(i + 1, jd)
            phi.pop()

    yield from rec(0, 0)


def embeddings(s_p, s_d) -> list[Embedding]:
    return list(iter_embeddings(s_p, s_d))


def contains(s_p, s_d) -> bool:
    for _ in iter_embeddings(s_p, s_d):
        return True
    return False


def support(s_p, db: Iterable[tuple[str, TransformationSequence | DataIndex]]) -> int:
    """Number of distinct gids whose sequence contains ``s_p``."""
    hit = set()
    for gid, s in db:
        if gid not in hit and contains(s_p, s):
            hit.add(gid)
    return len(hit)
