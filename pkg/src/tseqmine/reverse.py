"""Reverse-search miner for relevant frequent transformation subsequences.

The search tree has three layers. Skeletons (one rule per union-graph edge) are
grown gSpan-style by rightmost extension, each new rule landing in an existing
pattern interstate or a fresh one. Every canonical skeleton then seeds one
PrefixSpan run over its projected database, which adds later rules on skeleton
edges and rules on skeleton vertices in one go. Patterns on a single vertex
hang off the root through the same PrefixSpan machinery with an empty skeleton.
"""
from __future__ import annotations

import bisect
import math
import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .canonical import (EdgeGraph, code_of, is_min_code, min_dfs_code,
                        rightmost_path)
from .matcher import DataIndex, Embedding
from .model import (Kind, TransformationRule, TransformationSequence, edge,
                    pattern, rule_order_key)
from .prefixspan import Counter, ItemsetSequence, prefixspan


class MiningTimeout(RuntimeError):
    def __init__(self, partial):
        super().__init__(f"mining timed out after {len(partial)} patterns")
        self.partial = partial


class Share(float):
    """A min-support given as a share of the database, in (0, 1]."""


@dataclass
class MinerConfig:
    """``min_support`` is an absolute count (int), a fraction of |DB| (float < 1)
    or a ``Share`` (which may also be exactly 1)."""

    min_support: int | float
    max_rules: int | None = None
    stages: frozenset = frozenset({1, 2, 3})
    timeout: float | None = None

    def absolute_support(self, n_db: int) -> int:
        ms = self.min_support
        if isinstance(ms, Share) or (isinstance(ms, float) and not ms.is_integer()):
            if not 0 < ms <= 1:
                raise ValueError(f"fractional min-support must lie in (0, 1], got {ms}")
            return max(1, math.ceil(ms * n_db - 1e-9))
        if int(ms) < 1:
            raise ValueError("absolute min-support must be at least 1")
        return int(ms)


class MinedPattern(NamedTuple):
    sequence: TransformationSequence
    support: int
    code: tuple


@dataclass
class MiningStats:
    candidates: int = 0
    emitted: int = 0
    skeletons: int = 0
    seconds: float = 0.0


class Database:
    """Indexed transformation sequences with dense group ids for support counting."""

    def __init__(self, db: Iterable[tuple[str, TransformationSequence]]):
        self.entries = list(db)
        self.index = [DataIndex(s) for _, s in self.entries]
        names = {}
        self.group = [names.setdefault(gid, len(names)) for gid, _ in self.entries]
        self.n_groups = len(names)

    def __len__(self):
        return self.n_groups


# --------------------------------------------------------------------------
# skeleton stage


class SkelEmbedding(NamedTuple):
    seq: int
    phi: tuple[int, ...]
    psi: tuple[int, ...]  # data vertex of pattern vertex i + 1


@dataclass
class Skeleton:
    code: list          # DFS code tuples (i, j, (interstate, kind, label))
    states: int
    embeddings: list[SkelEmbedding]
    support: int = 0

    @property
    def rules(self) -> list[TransformationRule]:
        return [TransformationRule(p[0], 1, Kind(p[1]), (i, j), p[2]) for i, j, p in self.code]

    def sequence(self) -> TransformationSequence:
        return pattern(self.rules)

    def graph(self) -> EdgeGraph:
        return EdgeGraph({(i, j): p for i, j, p in self.code})

    @property
    def n_vertices(self) -> int:
        return max(max(i, j) for i, j, _ in self.code)


def slot_of(jd: int, phi: Sequence[int]) -> int:
    """Position of data interstate ``jd`` relative to the pattern's images.

    ``2k`` means "equal to pattern interstate k"; ``2k + 1`` means "strictly
    between pattern interstates k and k + 1" (k = 0 before the first, k = n
    after the last).
    """
    p = bisect.bisect_left(phi, jd)
    if p < len(phi) and phi[p] == jd:
        return 2 * (p + 1)
    return 2 * p + 1


def root_skeletons(db: Database, min_sup: int, stats: MiningStats) -> list[Skeleton]:
    """All frequent one-rule edge patterns."""
    found: dict[tuple, list] = {}
    for si, idx in enumerate(db.index):
        for (a, b), rules in idx.edge_rules.items():
            for r in rules:
                key = (int(r.kind), r.label)
                lst = found.setdefault(key, [])
                lst.append(SkelEmbedding(si, (r.j,), (a, b)))
                lst.append(SkelEmbedding(si, (r.j,), (b, a)))
    stats.candidates += len(found)
    out = []
    for key in sorted(found):
        embs = found[key]
        sup = len({db.group[e.seq] for e in embs})
        if sup >= min_sup:
            out.append(Skeleton([(1, 2, (1,) + key)], 1, embs, sup))
    return out


def p3_extensions(sk: Skeleton, db: Database, min_sup: int,
                  stats: MiningStats | None = None) -> list[Skeleton]:
    """Frequent canonical children of ``sk`` obtained by adding one rule on a new edge."""
    stats = stats if stats is not None else MiningStats()
    rmpath = rightmost_path(sk.code)
    r = rmpath[-1]
    nv = sk.n_vertices
    present = {edge(i, j) for i, j, _ in sk.code}
    found: dict[tuple, list] = {}
    for emb in sk.embeddings:
        idx = db.index[emb.seq]
        psi = emb.psi
        images = set(psi)
        gr = psi[r - 1]
        for u in rmpath[:-1]:
            if edge(r, u) in present:
                continue
            for rule in idx.edge_rules.get(edge(gr, psi[u - 1]), ()):
                key = (r, u, slot_of(rule.j, emb.phi), int(rule.kind), rule.label)
                found.setdefault(key, []).append((emb, rule.j, None))
        for u in reversed(rmpath):
            for w, rule in idx.adj.get(psi[u - 1], ()):
                if w in images:
                    continue
                key = (u, nv + 1, slot_of(rule.j, emb.phi), int(rule.kind), rule.label)
                found.setdefault(key, []).append((emb, rule.j, w))
    stats.candidates += len(found)
    children = []
    for key in sorted(found):
        occ = found[key]
        sup = len({db.group[e.seq] for e, _, _ in occ})
        if sup < min_sup:
            continue
        u, v, slot, kind, label = key
        if slot % 2 == 0:
            jj = slot // 2
            code = list(sk.code)
            states = sk.states
        else:
            jj = slot // 2 + 1
            code = [(a, b, (p[0] + (p[0] >= jj), p[1], p[2])) for a, b, p in sk.code]
            states = sk.states + 1
        code.append((u, v, (jj, kind, label)))
        g = EdgeGraph({(a, b): p for a, b, p in code})
        if not is_min_code(code, g):
            continue
        embs = []
        for e, jd, w in occ:
            phi = e.phi if slot % 2 == 0 else e.phi[:jj - 1] + (jd,) + e.phi[jj - 1:]
            psi = e.psi if w is None else e.psi + (w,)
            embs.append(SkelEmbedding(e.seq, phi, psi))
        children.append(Skeleton(code, states, embs, sup))
    return children


# --------------------------------------------------------------------------
# projection, reassignment and conversion


class ProjectedSequence(NamedTuple):
    gid: str
    rules: tuple[TransformationRule, ...]
    embedding: Embedding


def _skeleton_edges(skeleton: Sequence[TransformationRule]) -> list[TransformationRule]:
    rules = list(skeleton)
    if any(r.kind.on_vertex for r in rules):
        raise ValueError("a skeleton holds edge rules only")
    if len({r.target for r in rules}) != len(rules):
        raise ValueError("a skeleton holds one rule per edge")
    return rules


def project(s_d: TransformationSequence | DataIndex, skeleton: Sequence[TransformationRule],
            embeddings: Iterable[Embedding], gid: str = "") -> list[ProjectedSequence]:
    """One maximal projected sequence per embedding of the skeleton.

    Kept: the data rules matched by the skeleton, every rule on an image vertex,
    and every rule on an image edge at a later interstate than the skeleton
    rule on that edge. Everything else is dropped.
    """
    idx = s_d if isinstance(s_d, DataIndex) else DataIndex(s_d)
    sk = _skeleton_edges(skeleton)
    dense = {j: i for i, j in enumerate(sorted({r.j for r in sk}))}
    out = []
    for emb in embeddings:
        psi = emb.psi_map
        kept = []
        for v in sorted(psi.values()):
            kept.extend(idx.vertex_rules.get(v, ()))
        for r in sk:
            start = emb.phi[dense[r.j]]
            de = edge(psi[r.target[0]], psi[r.target[1]])
            kept.extend(x for x in idx.edge_rules.get(de, ()) if x.j >= start)
        kept.sort(key=lambda x: (x.j, x.k))
        out.append(ProjectedSequence(gid, tuple(kept), emb))
    return out


def reassign(p: ProjectedSequence) -> list[TransformationRule]:
    """Rules of a projection rewritten in the pattern's vertex ids."""
    inv = {d: q for q, d in p.embedding.psi}
    out = []
    for r in p.rules:
        if isinstance(r.target, int):
            t: object = inv[r.target]
        else:
            t = edge(inv[r.target[0]], inv[r.target[1]])
        out.append(TransformationRule(r.j, r.k, r.kind, t, r.label))
    return out


def _item(r: TransformationRule) -> tuple:
    return (int(r.kind), r.target, r.label)


def convert_plain(p: ProjectedSequence) -> ItemsetSequence:
    """Reassigned projection as an itemset sequence, skeleton items included."""
    groups: dict[int, set] = {}
    for r in reassign(p):
        groups.setdefault(r.j, set()).add(_item(r))
    return ItemsetSequence(p.gid, tuple(frozenset(groups[j]) for j in sorted(groups)))


def reassign_and_convert(projections: Iterable[ProjectedSequence],
                         skeleton: Sequence[TransformationRule]) -> list[ItemsetSequence]:
    """Annotated itemset sequences with the skeleton occurrence removed.

    Items are ``(position, kind, target, label)`` where ``position`` is the
    slot code of ``slot_of``: before / equal to / after the skeleton interstates.
    """
    sk = _skeleton_edges(skeleton)
    dense = {j: i for i, j in enumerate(sorted({r.j for r in sk}))}
    skel_at = {r.target: dense[r.j] for r in sk}
    out = []
    for p in projections:
        phi = p.embedding.phi
        groups: dict[int, set] = {}
        for r in reassign(p):
            if r.target in skel_at and phi[skel_at[r.target]] == r.j:
                continue
            groups.setdefault(r.j, set()).add((slot_of(r.j, phi),) + _item(r))
        out.append(ItemsetSequence(p.gid, tuple(frozenset(groups[j]) for j in sorted(groups))))
    return out


def reconvert(elements: Sequence[Sequence[tuple]],
              skeleton: Sequence[TransformationRule]) -> TransformationSequence:
    """Interleave annotated items with the skeleton and renumber interstates."""
    sk = list(skeleton)
    dense = {j: i + 1 for i, j in enumerate(sorted({r.j for r in sk}))}
    n = len(dense)
    keyed: list[tuple[tuple, TransformationRule]] = []
    for r in sk:
        keyed.append(((2 * dense[r.j], 0), r))
    last = 0
    seen_equal = set()
    for ei, element in enumerate(elements):
        slots = {it[0] for it in element}
        if len(slots) != 1:
            raise ValueError(f"element {element} mixes positions")
        (slot,) = slots
        if slot < last or slot > 2 * n + 1 or slot < 1:
            raise ValueError(f"position {slot} out of order")
        if slot % 2 == 0:
            if slot in seen_equal:
                raise ValueError(f"two elements claim skeleton interstate {slot // 2}")
            seen_equal.add(slot)
            key = (slot, 0)
        else:
            key = (slot, ei + 1)
        last = slot
        for _, kind, target, label in element:
            keyed.append((key, TransformationRule(1, 1, Kind(kind), target, label)))
    order = {k: i + 1 for i, k in enumerate(sorted({k for k, _ in keyed}))}
    return pattern(TransformationRule(order[k], 1, r.kind, r.target, r.label) for k, r in keyed)


# --------------------------------------------------------------------------
# the search


def _extras_key(rules: Sequence[TransformationRule], ren: dict) -> tuple:
    red, ver = [], []
    for r in rules:
        if isinstance(r.target, int):
            ver.append((r.j, int(r.kind), ren[r.target], r.label))
        else:
            a, b = edge(ren[r.target[0]], ren[r.target[1]])
            red.append((r.j, int(r.kind), a, b, r.label))
    return (tuple(sorted(red)), tuple(sorted(ver)))


class ReverseMiner:
    def __init__(self, db: Iterable[tuple[str, TransformationSequence]] | Database,
                 config: MinerConfig):
        self.db = db if isinstance(db, Database) else Database(db)
        self.config = config
        self.min_sup = config.absolute_support(len(self.db))
        self.stats = MiningStats()
        self.results: list[MinedPattern] = []
        self._deadline = None

    # -- helpers

    def _check_time(self):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise MiningTimeout(sorted(self.results, key=lambda m: m.code))

    def _emit(self, seq: TransformationSequence, support: int, code: tuple | None = None):
        if code is None:
            code = code_of(seq)
        self.results.append(MinedPattern(seq, support, code))
        self.stats.emitted += 1

    def _room(self, used: int) -> int | None:
        cap = self.config.max_rules
        return None if cap is None else cap - used

    # -- stages

    def _vertex_only(self):
        """Patterns whose union graph is one vertex."""
        seqs = []
        for si, idx in enumerate(self.db.index):
            g = self.db.group[si]
            for v, rules in idx.vertex_rules.items():
                groups: dict[int, set] = {}
                for r in rules:
                    groups.setdefault(r.j, set()).add((1, int(r.kind), 1, r.label))
                seqs.append(ItemsetSequence(g, tuple(frozenset(groups[j]) for j in sorted(groups))))
        counter = Counter()
        for elements, sup in prefixspan(seqs, self.min_sup, self._room(0), counter):
            self._check_time()
            seq = reconvert(elements, [])
            self._emit(seq, sup)
        self.stats.candidates += counter.candidates

    def _attach(self, sk: Skeleton):
        """Emit every canonical pattern whose skeleton is ``sk`` (sk itself excluded)."""
        room = self._room(len(sk.code))
        if room is not None and room <= 0:
            return
        rules = sk.rules
        seqs = []
        for e in sk.embeddings:
            emb = Embedding(e.phi, tuple(enumerate(e.psi, 1)))
            proj = project(self.db.index[e.seq], rules, [emb], self.db.group[e.seq])
            seqs.extend(reassign_and_convert(proj, rules))
        # renamings that fix the skeleton code: the skeleton's automorphisms
        _, autos = min_dfs_code(sk.graph())
        renamings = [{gv: cv for cv, gv in a.items()} for a in autos]
        ident = {v: v for v in range(1, sk.n_vertices + 1)}
        allow_edges = 2 in self.config.stages
        allow_vertices = 1 in self.config.stages
        counter = Counter()
        for elements, sup in prefixspan(seqs, self.min_sup, room, counter):
            self._check_time()
            if not allow_edges and any(Kind(it[1]).on_edge for el in elements for it in el):
                continue
            if not allow_vertices and any(Kind(it[1]).on_vertex for el in elements for it in el):
                continue
            seq = reconvert(elements, rules)
            extras = [r for r in seq if r.kind.on_vertex] + self._redundant(seq)
            mine = _extras_key(extras, ident)
            if any(_extras_key(extras, ren) < mine for ren in renamings):
                continue
            self._emit(seq, sup)
        self.stats.candidates += counter.candidates

    @staticmethod
    def _redundant(seq: TransformationSequence) -> list[TransformationRule]:
        first = set()
        out = []
        for r in sorted((r for r in seq if r.kind.on_edge), key=rule_order_key):
            if r.target in first:
                out.append(r)
            first.add(r.target)
        return out

    def _grow(self, sk: Skeleton):
        self._check_time()
        self.stats.skeletons += 1
        seq = sk.sequence()
        self._emit(seq, sk.support)
        cap = self.config.max_rules
        if 3 in self.config.stages and (cap is None or len(sk.code) < cap):
            for child in p3_extensions(sk, self.db, self.min_sup, self.stats):
                self._grow(child)
        if self.config.stages & {1, 2}:
            self._attach(sk)

    def _start(self):
        self._t0 = time.monotonic()
        if self.config.timeout is not None:
            self._deadline = self._t0 + self.config.timeout

    def branches(self) -> list:
        """Independent subtrees under the root: the single-vertex one, then one per edge rule."""
        out: list = []
        if 1 in self.config.stages:
            out.append("vertex")
        if 3 in self.config.stages:
            out.extend(range(len(self._roots())))
        return out

    def _roots(self) -> list[Skeleton]:
        if not hasattr(self, "_root_cache"):
            self._root_cache = root_skeletons(self.db, self.min_sup, self.stats)
        return self._root_cache

    def run_branch(self, branch) -> None:
        if branch == "vertex":
            self._vertex_only()
        else:
            self._grow(self._roots()[branch])

    def run(self) -> list[MinedPattern]:
        self._start()
        try:
            for b in self.branches():
                self.run_branch(b)
        finally:
            self.stats.seconds = time.monotonic() - self._t0
        return sorted(self.results, key=lambda m: m.code)


# --------------------------------------------------------------------------
# fan-out over root branches

_WORKER = None


def _init_worker(factory, db, config):
    global _WORKER
    _WORKER = factory(db, config)
    _WORKER.branches()  # warm the root cache outside any branch's statistics
    _WORKER._start()


def _run_worker_branch(branch):
    w = _WORKER
    w.results, w.stats = [], MiningStats()
    try:
        w.run_branch(branch)
    except MiningTimeout:
        return branch, w.results, w.stats, True
    return branch, w.results, w.stats, False


def run_parallel(factory, db, config, jobs: int):
    """Run ``factory(db, config)``'s branches on ``jobs`` processes.

    Returns (per-branch results in branch order, summed stats, timed_out).
    """
    from concurrent.futures import ProcessPoolExecutor

    entries = db.entries if isinstance(db, Database) else list(db)
    probe = factory(entries, config)
    branches = probe.branches()
    stats = MiningStats(candidates=probe.stats.candidates)
    parts: dict = {}
    timed_out = False
    t0 = time.monotonic()
    with ProcessPoolExecutor(jobs, initializer=_init_worker,
                             initargs=(factory, entries, config)) as ex:
        for branch, res, st, to in ex.map(_run_worker_branch, branches):
            parts[branch] = res
            stats.candidates += st.candidates
            stats.emitted += st.emitted
            stats.skeletons += st.skeletons
            timed_out |= to
    stats.seconds = time.monotonic() - t0
    return [parts[b] for b in branches], stats, timed_out


def mine(db, config: MinerConfig, jobs: int = 1,
         stats: MiningStats | None = None) -> list[MinedPattern]:
    """All canonical relevant frequent patterns, sorted by code.

    ``jobs > 1`` spreads the root branches over worker processes; the result
    does not depend on ``jobs``.
    """
    if jobs <= 1:
        miner = ReverseMiner(db, config)
        try:
            return miner.run()
        finally:
            if stats is not None:
                stats.__dict__.update(miner.stats.__dict__)
    parts, st, timed_out = run_parallel(ReverseMiner, db, config, jobs)
    if stats is not None:
        stats.__dict__.update(st.__dict__)
    out = sorted((m for part in parts for m in part), key=lambda m: m.code)
    if timed_out:
        raise MiningTimeout(out)
    return out
