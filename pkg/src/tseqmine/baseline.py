"""Tail-append miner of all frequent transformation subsequences.

Patterns grow one rule at a time at the end: either inside the last pattern
interstate or in a new, later one. Occurrences are carried along so supports
come from the data without re-matching. Isomorphic duplicates are merged by
``generic_code`` and only the first representative of each class is extended.
The relevant patterns are then kept by a post-filter. This is the slow,
obviously-complete reference the reverse-search miner is checked against.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .canonical import canonical_form, generic_code
from .matcher import DataIndex
from .model import (Kind, TransformationRule, TransformationSequence, edge,
                    is_relevant, pattern)
from .reverse import (Database, MinedPattern, MinerConfig, MiningStats, MiningTimeout,
                      run_parallel)


class _Occ(NamedTuple):
    seq: int
    phi: tuple[int, ...]
    psi: tuple[tuple[int, int], ...]  # sorted (pattern vertex, data vertex)


@dataclass
class FTS:
    """A frequent pattern in the baseline's own (non-canonical) frame."""

    sequence: TransformationSequence
    support: int


def _extensions(rules, n_states, n_vertices, occ: _Occ, idx: DataIndex):
    """(key, new occurrence) for every tail append supported by one occurrence."""
    inv = {d: p for p, d in occ.psi}
    last = occ.phi[-1] if occ.phi else 0
    present = {(r.kind, r.target, r.label) for r in rules if r.j == n_states}
    nxt = n_vertices + 1
    for jd in range(max(last, 1), idx.states + 1):
        same = jd == last and n_states > 0
        slot = n_states if same else n_states + 1
        phi = occ.phi if same else occ.phi + (jd,)
        for (kind, label), targets in idx.at[jd].items():
            for t in targets:
                if isinstance(t, int):
                    if t in inv:
                        key = (slot, int(kind), inv[t], label)
                        if same and (kind, inv[t], label) in present:
                            continue
                        yield key, _Occ(occ.seq, phi, occ.psi)
                    else:
                        yield (slot, int(kind), -1, label), _Occ(
                            occ.seq, phi, tuple(sorted(occ.psi + ((nxt, t),))))
                    continue
                a, b = t
                pa, pb = inv.get(a), inv.get(b)
                if pa is not None and pb is not None:
                    tgt = edge(pa, pb)
                    if same and (kind, tgt, label) in present:
                        continue
                    yield (slot, int(kind), tgt, label), _Occ(occ.seq, phi, occ.psi)
                elif pa is not None or pb is not None:
                    old, new = (pa, b) if pa is not None else (pb, a)
                    yield (slot, int(kind), (old, -1), label), _Occ(
                        occ.seq, phi, tuple(sorted(occ.psi + ((nxt, new),))))
                else:
                    for x, y in ((a, b), (b, a)):
                        yield (slot, int(kind), (-1, -2), label), _Occ(
                            occ.seq, phi, tuple(sorted(occ.psi + ((nxt, x), (nxt + 1, y)))))


def _rule_of(key, n_vertices) -> TransformationRule:
    slot, kind, tgt, label = key
    nxt = n_vertices + 1
    if isinstance(tgt, int):
        target: object = nxt if tgt == -1 else tgt
    else:
        target = tuple(nxt if v == -1 else nxt + 1 if v == -2 else v for v in tgt)
    return TransformationRule(slot, 1, Kind(kind), target, label)


class BaselineMiner:
    def __init__(self, db: Iterable[tuple[str, TransformationSequence]] | Database,
                 config: MinerConfig):
        self.db = db if isinstance(db, Database) else Database(db)
        self.config = config
        self.min_sup = config.absolute_support(len(self.db))
        self.stats = MiningStats()
        self.seen: set[tuple] = set()
        self.results: list[FTS] = []
        self._deadline = None
        self._t0 = time.monotonic()

    def _start(self):
        self._t0 = time.monotonic()
        if self.config.timeout is not None:
            self._deadline = self._t0 + self.config.timeout

    def _candidates(self, rules, n_states, n_vertices, occs) -> dict[tuple, list[_Occ]]:
        cands: dict[tuple, dict[_Occ, None]] = {}
        for occ in occs:
            for key, new in _extensions(rules, n_states, n_vertices, occ, self.db.index[occ.seq]):
                cands.setdefault(key, {})[new] = None
        self.stats.candidates += len(cands)
        return {key: list(cands[key]) for key in sorted(cands, key=repr)}

    def _expand(self, rules, n_vertices, key, occs):
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise MiningTimeout(list(self.results))
        sup = len({self.db.group[o.seq] for o in occs})
        if sup < self.min_sup:
            return
        child = rules + [_rule_of(key, n_vertices)]
        seq = pattern(child)
        code = generic_code(seq)
        if code in self.seen:
            return
        self.seen.add(code)
        self.results.append(FTS(seq, sup))
        self.stats.emitted += 1
        cap = self.config.max_rules
        if cap is not None and len(child) >= cap:
            return
        nv = max(v for r in child for v in r.vertices)
        for k, o in self._candidates(list(seq), key[0], nv, occs).items():
            self._expand(list(seq), nv, k, o)

    def _roots(self):
        if not hasattr(self, "_root_cache"):
            occs = [_Occ(i, (), ()) for i in range(len(self.db.entries))]
            self._root_cache = list(self._candidates([], 0, 0, occs).items())
        return self._root_cache

    def branches(self) -> list[int]:
        if self.config.max_rules is not None and self.config.max_rules < 1:
            return []
        return list(range(len(self._roots())))

    def run_branch(self, i: int) -> None:
        key, occs = self._roots()[i]
        self._expand([], 0, key, occs)

    def run(self) -> list[FTS]:
        self._start()
        try:
            for b in self.branches():
                self.run_branch(b)
        finally:
            self.stats.seconds = time.monotonic() - self._t0
        return list(self.results)


def mine_all_fts(db, config: MinerConfig, stats: MiningStats | None = None,
                 jobs: int = 1) -> list[FTS]:
    """Every frequent transformation subsequence, one representative per isomorphism class."""
    if jobs <= 1:
        miner = BaselineMiner(db, config)
        try:
            return miner.run()
        finally:
            if stats is not None:
                stats.__dict__.update(miner.stats.__dict__)
    parts, st, timed_out = run_parallel(BaselineMiner, db, config, jobs)
    # workers deduplicate only within their own branches
    seen: set = set()
    out = []
    for part in parts:
        for f in part:
            code = generic_code(f.sequence)
            if code not in seen:
                seen.add(code)
                out.append(f)
    if stats is not None:
        stats.__dict__.update(st.__dict__)
        stats.emitted = len(out)
    if timed_out:
        raise MiningTimeout(out)
    return out


def filter_relevant(fts: Iterable[FTS]) -> list[MinedPattern]:
    """Relevant patterns in canonical form, sorted by code."""
    out = []
    for f in fts:
        if is_relevant(f.sequence):
            cf = canonical_form(f.sequence)
            out.append(MinedPattern(cf.sequence, f.support, cf.code))
    return sorted(out, key=lambda m: m.code)


def irrelevance_ratio(fts: list[FTS]) -> float:
    """Share of frequent patterns whose union graph is disconnected (0 when none)."""
    if not fts:
        return 0.0
    bad = sum(1 for f in fts if not is_relevant(f.sequence))
    return bad / len(fts)


def mine(db, config: MinerConfig, jobs: int = 1,
         stats: MiningStats | None = None) -> list[MinedPattern]:
    return filter_relevant(mine_all_fts(db, config, stats, jobs))
