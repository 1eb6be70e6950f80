"""Shared fixtures, random databases and brute-force oracles."""
from __future__ import annotations

import itertools
import random
from importlib import resources

import pytest

from tseqmine.canonical import generic_code
from tseqmine.compiler import compile_sequence
from tseqmine.formats import read_gsq
from tseqmine.model import LabeledGraph, GraphSequence, edge, pattern


def bundled(name: str) -> list[GraphSequence]:
    text = resources.files("tseqmine").joinpath("data", name).read_text()
    return read_gsq(text, source=name)


def compiled(seqs) -> list[tuple]:
    return [(d.gid, compile_sequence(d)) for d in seqs]


@pytest.fixture
def two_orders():
    return compiled(bundled("two_orders.gsq"))


@pytest.fixture
def path_projection():
    return compiled(bundled("path_projection.gsq"))


def random_graph_sequence(rng: random.Random, gid: str, n_states: int = 4, n_ids: int = 4,
                          edits: int = 4, vlabels: str = "AB", elabels: str = "xy") -> GraphSequence:
    """A random walk of small edits covering all six rule kinds."""
    graphs = []
    g = LabeledGraph()
    for _ in range(n_states):
        g = g.copy()
        for _ in range(edits):
            vs = sorted(g.vertices)
            op = rng.random()
            if op < 0.3 or not vs:
                v = rng.randrange(1, n_ids + 1)
                if v not in g.vertices:
                    g.vertices[v] = rng.choice(vlabels)
            elif op < 0.4:
                v = rng.choice(vs)
                if g.degree(v) == 0:
                    del g.vertices[v]
            elif op < 0.75 and len(vs) > 1:
                e = edge(*rng.sample(vs, 2))
                if e in g.edges:
                    del g.edges[e]
                else:
                    g.edges[e] = rng.choice(elabels)
            elif op < 0.9 or not g.edges:
                v = rng.choice(vs)
                g.vertices[v] = rng.choice(vlabels)
            else:
                e = rng.choice(sorted(g.edges))
                g.edges[e] = rng.choice(elabels)
        graphs.append(g)
    return GraphSequence(gid, graphs)


def random_db(seed: int, size: int = 4, **kw) -> list[tuple]:
    rng = random.Random(seed)
    return compiled(random_graph_sequence(rng, f"g{i}", **kw) for i in range(size))


# --------------------------------------------------------------------------
# brute-force oracles


def brute_embeddings(s_p, s_d) -> set[tuple]:
    """All (phi, psi) by trying every increasing interstate map and vertex injection."""
    groups: dict[int, set] = {}
    for r in s_p:
        groups.setdefault(r.j, set()).add(r)
    js = sorted(groups)
    at: dict[int, set] = {}
    for r in s_d:
        at.setdefault(r.j, set()).add(r.key)
    pv = sorted({v for r in s_p for v in r.vertices})
    dv = sorted({v for r in s_d for v in r.vertices})
    out = set()
    for phi in itertools.combinations(range(1, s_d.states + 1), len(js)):
        for image in itertools.permutations(dv, len(pv)):
            m = dict(zip(pv, image))
            ok = True
            for j, jd in zip(js, phi):
                for r in groups[j]:
                    t = m[r.target] if isinstance(r.target, int) else edge(m[r.target[0]], m[r.target[1]])
                    if (r.kind, t, r.label) not in at.get(jd, ()):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                out.add((phi, tuple(sorted(m.items()))))
    return out


def brute_support(s_p, db) -> int:
    return len({gid for gid, s in db if brute_embeddings(s_p, s)})


def all_subsequences(db, max_len: int) -> dict[tuple, object]:
    """Every pattern obtainable as a subsequence of some data sequence, by generic code."""
    found = {}
    for _, s in db:
        rules = list(s)
        for n in range(1, max_len + 1):
            for sub in itertools.combinations(rules, n):
                p = pattern(sub)
                found.setdefault(generic_code(p), p)
    return found


# --------------------------------------------------------------------------
# acceptance summary: one line per criterion at the end of the run

ACCEPTANCE: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
