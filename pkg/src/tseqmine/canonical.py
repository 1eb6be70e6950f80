"""DFS codes and canonical forms of pattern sequences.

A relevant pattern splits into three layers, matching the order in which its
rules are peeled off on the way back to the empty pattern:

* the *skeleton*: the earliest rule on every union-graph edge. It is an
  edge-labeled graph (label = interstate, kind, label) and is coded with gSpan
  DFS codes;
* *redundant* edge rules: later rules on skeleton edges, in sequence order;
* vertex rules, in sequence order.

The code of a pattern under a DFS numbering of its union graph is the
concatenation of the three layers; the canonical form is the minimum over all
DFS numberings.
"""
from __future__ import annotations

from functools import cmp_to_key
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

from .model import (Kind, TransformationRule, TransformationSequence, edge,
                    is_relevant, pattern, rule_order_key)

Tuple = tuple  # (i, j, payload)


# --------------------------------------------------------------------------
# gSpan DFS codes


def tuple_cmp(a: Tuple, b: Tuple) -> int:
    """gSpan order on DFS code tuples: structure first, then payload."""
    i1, j1 = a[0], a[1]
    i2, j2 = b[0], b[1]
    if (i1, j1) != (i2, j2):
        f1, f2 = i1 < j1, i2 < j2
        if f1 and f2:
            less = j1 < j2 or (j1 == j2 and i1 > i2)
        elif not f1 and not f2:
            less = i1 < i2 or (i1 == i2 and j1 < j2)
        elif not f1 and f2:
            less = i1 < j2
        else:
            less = j1 <= i2
        return -1 if less else 1
    if a[2] == b[2]:
        return 0
    return -1 if a[2] < b[2] else 1


def code_cmp(alpha: Sequence[Tuple], beta: Sequence[Tuple]) -> int:
    for a, b in zip(alpha, beta):
        c = tuple_cmp(a, b)
        if c:
            return c
    return (len(alpha) > len(beta)) - (len(alpha) < len(beta))


def code_less(alpha, beta) -> bool:
    return code_cmp(alpha, beta) < 0


def rightmost_path(code: Sequence[Tuple]) -> list[int]:
    """Vertices of the rightmost path, root first."""
    if not code:
        return []
    parent = {}
    for i, j, _ in code:
        if i < j:
            parent[j] = i
    v = max(max(t[0], t[1]) for t in code)
    path = [v]
    while v in parent:
        v = parent[v]
        path.append(v)
    return path[::-1]


class EdgeGraph:
    """Undirected graph with hashable, ordered payloads on edges (and optionally vertices)."""

    def __init__(self, edges: Mapping[tuple[int, int], Hashable],
                 vertex_labels: Mapping[int, Hashable] | None = None):
        self.edges = {edge(*e): p for e, p in edges.items()}
        self.vlab = dict(vertex_labels) if vertex_labels else None
        self.adj: dict[int, list[int]] = {}
        for a, b in self.edges:
            self.adj.setdefault(a, []).append(b)
            self.adj.setdefault(b, []).append(a)
        for v in (self.vlab or {}):
            self.adj.setdefault(v, [])

    def payload(self, a: int, b: int):
        p = self.edges[edge(a, b)]
        if self.vlab is None:
            return p
        return (self.vlab[a], p, self.vlab[b])


def _extensions(g: EdgeGraph, code, rmpath, emb, used):
    """Rightmost extensions of one embedding: (tuple, new_vertex_or_None, graph_edge)."""
    out = []
    r = rmpath[-1]
    gr = emb[r]
    mapped = set(emb.values())
    for u in rmpath[:-1]:
        e = edge(gr, emb[u])
        if e in g.edges and e not in used:
            out.append(((r, u, g.payload(gr, emb[u])), None, e))
    nxt = len(emb) + 1
    for u in reversed(rmpath):
        gu = emb[u]
        for w in g.adj[gu]:
            if w not in mapped:
                out.append(((u, nxt, g.payload(gu, w)), w, edge(gu, w)))
    return out


def min_dfs_code(g: EdgeGraph, stop_if_less_than: Sequence[Tuple] | None = None):
    """Minimum DFS code of a connected graph and all embeddings realising it.

    Embeddings map code vertex (1-based) to graph vertex. With
    ``stop_if_less_than`` the search returns ``(None, None)`` as soon as the
    minimum is known to be smaller than that code.
    """
    if not g.edges:
        raise ValueError("graph has no edges")
    first = []
    for (a, b) in g.edges:
        for x, y in ((a, b), (b, a)):
            first.append(((1, 2, g.payload(x, y)), {1: x, 2: y}, {edge(x, y)}))
    key = cmp_to_key(tuple_cmp)
    best = min((f[0] for f in first), key=key)
    code = [best]
    states = [(emb, used) for t, emb, used in first if t == best]
    if stop_if_less_than is not None and tuple_cmp(best, stop_if_less_than[0]) < 0:
        return None, None
    while len(code) < len(g.edges):
        rmpath = rightmost_path(code)
        cands = []
        for emb, used in states:
            for t, w, e in _extensions(g, code, rmpath, emb, used):
                cands.append((t, emb, used, w, e))
        if not cands:
            raise ValueError("graph is not connected")
        best = min((c[0] for c in cands), key=key)
        if stop_if_less_than is not None:
            pos = len(code)
            if pos < len(stop_if_less_than) and tuple_cmp(best, stop_if_less_than[pos]) < 0:
                return None, None
        code.append(best)
        new_states = []
        for t, emb, used, w, e in cands:
            if t != best:
                continue
            emb2 = dict(emb)
            if w is not None:
                emb2[t[1]] = w
            new_states.append((emb2, used | {e}))
        states = new_states
    embs = []
    seen = set()
    for emb, _ in states:
        k = tuple(sorted(emb.items()))
        if k not in seen:
            seen.add(k)
            embs.append(emb)
    return code, embs


def is_min_code(code: Sequence[Tuple], g: EdgeGraph) -> bool:
    best, _ = min_dfs_code(g, stop_if_less_than=code)
    return best is not None and list(best) == list(code)


def dfs_code_of_numbering(g: EdgeGraph) -> list[Tuple] | None:
    """DFS code read off a graph whose vertex ids already are a DFS numbering 1..n.

    Returns None when the ids are not a valid depth-first discovery order.
    """
    n = len(g.adj)
    if sorted(g.adj) != list(range(1, n + 1)):
        return None
    parent = {}
    stack = [1]
    for i in range(2, n + 1):
        earlier = [u for u in g.adj[i] if u < i]
        if not earlier:
            return None
        p = max(earlier)
        while stack and stack[-1] != p:
            done = stack.pop()
            if any(w >= i for w in g.adj[done]):
                return None
        if not stack:
            return None
        parent[i] = p
        stack.append(i)
    tuples = []
    for (a, b) in g.edges:
        if parent.get(b) == a:
            tuples.append((a, b, g.payload(a, b)))
        elif parent.get(a) == b:
            tuples.append((b, a, g.payload(b, a)))
        else:
            hi, lo = max(a, b), min(a, b)
            tuples.append((hi, lo, g.payload(hi, lo)))
    tuples.sort(key=cmp_to_key(tuple_cmp))
    return tuples


# --------------------------------------------------------------------------
# rule order and pattern codes


def tr_order(a: TransformationRule, b: TransformationRule) -> int:
    """-1, 0 or 1 comparing two pattern rules by interstate, kind, target, label."""
    ka, kb = rule_order_key(a), rule_order_key(b)
    return (ka > kb) - (ka < kb)


def _dense(rules: Iterable[TransformationRule]) -> dict[int, int]:
    return {j: i + 1 for i, j in enumerate(sorted({r.j for r in rules}))}


class Layers(NamedTuple):
    skeleton: list[TransformationRule]
    redundant: list[TransformationRule]
    vertex: list[TransformationRule]


def split_layers(s: Sequence[TransformationRule]) -> Layers:
    first: dict[tuple[int, int], TransformationRule] = {}
    for r in sorted((r for r in s if r.kind.on_edge), key=rule_order_key):
        first.setdefault(r.target, r)
    skel = set(id(r) for r in first.values())
    redundant = [r for r in s if r.kind.on_edge and id(r) not in skel]
    vertex = [r for r in s if r.kind.on_vertex]
    return Layers(sorted(first.values(), key=rule_order_key),
                  sorted(redundant, key=rule_order_key),
                  sorted(vertex, key=rule_order_key))


def skeleton_graph(skeleton: Iterable[TransformationRule], dense: Mapping[int, int]) -> EdgeGraph:
    return EdgeGraph({r.target: (dense[r.j], int(r.kind), r.label) for r in skeleton})


def _edge_tuple(r, dense, ren):
    a, b = edge(ren[r.target[0]], ren[r.target[1]])
    return (dense[r.j], int(r.kind), a, b, r.label)


def _vertex_tuple(r, dense, ren):
    return (dense[r.j], int(r.kind), ren[r.target], r.label)


def extras_code(layers: Layers, dense, ren) -> tuple[tuple, tuple]:
    return (tuple(sorted(_edge_tuple(r, dense, ren) for r in layers.redundant)),
            tuple(sorted(_vertex_tuple(r, dense, ren) for r in layers.vertex)))


class CanonicalForm(NamedTuple):
    code: tuple
    sequence: TransformationSequence


def code_of(s: Sequence[TransformationRule], assignment: Mapping[int, int] | None = None) -> tuple:
    """Code of ``s`` after renaming vertices by ``assignment`` (identity by default).

    The renamed vertex ids must form a DFS numbering of the union graph.
    """
    if len(s) == 0 or not is_relevant(s):
        raise ValueError("codes are defined for relevant, non-empty patterns only")
    ren = dict(assignment) if assignment is not None else {v: v for r in s for v in r.vertices}
    dense = _dense(s)
    layers = split_layers(s)
    if not layers.skeleton:
        return ((),) + extras_code(layers, dense, ren)
    g = EdgeGraph({edge(ren[r.target[0]], ren[r.target[1]]): (dense[r.j], int(r.kind), r.label)
                   for r in layers.skeleton})
    sk = dfs_code_of_numbering(g)
    if sk is None:
        raise ValueError("assignment is not a depth-first numbering of the union graph")
    return (tuple(sk),) + extras_code(layers, dense, ren)


def canonical_form(s: Sequence[TransformationRule]) -> CanonicalForm:
    """Minimal code of a relevant pattern and the pattern relabeled to realise it."""
    if len(s) == 0 or not is_relevant(s):
        raise ValueError("canonical forms are defined for relevant, non-empty patterns only")
    dense = _dense(s)
    layers = split_layers(s)
    if not layers.skeleton:
        (v,) = {r.target for r in s}
        ren = {v: 1}
        code = ((),) + extras_code(layers, dense, ren)
    else:
        g = skeleton_graph(layers.skeleton, dense)
        sk, embs = min_dfs_code(g)
        best = None
        for emb in embs:
            inv = {gv: cv for cv, gv in emb.items()}
            ex = extras_code(layers, dense, inv)
            if best is None or ex < best[0]:
                best = (ex, inv)
        ren = best[1]
        code = (tuple(sk),) + best[0]
    seq = pattern(TransformationRule(dense[r.j], 1, r.kind,
                                     ren[r.target] if isinstance(r.target, int)
                                     else (ren[r.target[0]], ren[r.target[1]]),
                                     r.label) for r in s)
    return CanonicalForm(code, seq)


def parent(s: Sequence[TransformationRule]) -> tuple[int, TransformationSequence | None]:
    """The search-tree parent of a relevant pattern, and which step removed a rule.

    Step 1 drops the last vertex rule of the canonical code, step 2 (no vertex
    rules left) the last redundant edge rule, step 3 (every edge touched once)
    the rule of the last DFS-code edge. ``None`` stands for the empty pattern.
    """
    cf = canonical_form(s)
    skel, red, vert = cf.code
    rules = list(cf.sequence)
    dense = _dense(rules)
    if vert:
        j, kind, v, label = vert[-1]
        drop = [r for r in rules if r.kind.on_vertex and
                (dense[r.j], int(r.kind), r.target, r.label) == (j, kind, v, label)]
        step = 1
    elif red:
        j, kind, a, b, label = red[-1]
        layer = split_layers(rules).redundant
        drop = [r for r in layer if (dense[r.j], int(r.kind), r.target, r.label) == (j, kind, (a, b), label)]
        step = 2
    else:
        a, b, _ = skel[-1]
        drop = [r for r in rules if r.target == edge(a, b)]
        step = 3
    rest = [r for r in rules if r is not drop[0]]
    return step, (pattern(rest) if rest else None)


def is_canonical(s: Sequence[TransformationRule]) -> bool:
    try:
        mine = code_of(s)
    except ValueError as exc:
        if "depth-first" in str(exc):
            return False
        raise
    return mine == canonical_form(s).code


# --------------------------------------------------------------------------
# canonical form of arbitrary (possibly disconnected) patterns


def generic_code(s: Sequence[TransformationRule]) -> tuple:
    """Lexicographically least rule list over all vertex renamings.

    Interstates are renumbered densely; inside an interstate rules are sorted.
    Works for disconnected patterns; used to deduplicate unconstrained search.
    """
    dense = _dense(s)
    groups: dict[int, list[TransformationRule]] = {}
    for r in s:
        groups.setdefault(dense[r.j], []).append(r)
    order = [groups[j] for j in sorted(groups)]

    def render(r, ren, nxt):
        """Tuple for r under ren, fresh ids for unmapped vertices; also the orientations."""
        if isinstance(r.target, int):
            v = r.target
            if v in ren:
                return [((int(r.kind), (ren[v],), r.label), {})]
            return [((int(r.kind), (nxt,), r.label), {v: nxt})]
        a, b = r.target
        if a in ren and b in ren:
            return [((int(r.kind), edge(ren[a], ren[b]), r.label), {})]
        if a in ren or b in ren:
            old, new = (a, b) if a in ren else (b, a)
            return [((int(r.kind), edge(ren[old], nxt), r.label), {new: nxt})]
        return [((int(r.kind), (nxt, nxt + 1), r.label), {a: nxt, b: nxt + 1}),
                ((int(r.kind), (nxt, nxt + 1), r.label), {b: nxt, a: nxt + 1})]

    # beam of partial states sharing the best prefix: (ren, group index, remaining ids)
    states = [({}, 0, frozenset(range(len(order[0]))) if order else frozenset())]
    out: list[tuple] = []
    total = len(s)
    while len(out) < total:
        best = None
        nxt_states = []
        for ren, gi, rem in states:
            if not rem:
                gi += 1
                rem = frozenset(range(len(order[gi])))
            nxt = len(ren) + 1
            for idx in rem:
                for tup, add in render(order[gi][idx], ren, nxt):
                    full = (gi + 1,) + tup
                    if best is None or full < best:
                        best = full
                        nxt_states = []
                    if full == best:
                        ren2 = dict(ren)
                        ren2.update(add)
                        nxt_states.append((ren2, gi, rem - {idx}))
        out.append(best)
        uniq = {}
        for ren, gi, rem in nxt_states:
            uniq.setdefault((tuple(sorted(ren.items())), gi, rem), (ren, gi, rem))
        states = list(uniq.values())
    return tuple(out)


def generic_form(s: Sequence[TransformationRule]) -> TransformationSequence:
    """Pattern rebuilt from its generic code."""
    rules = []
    for j, kind, tgt, label in generic_code(s):
        target = tgt[0] if len(tgt) == 1 else tgt
        rules.append(TransformationRule(j, 1, Kind(kind), target, label))
    return pattern(rules)
