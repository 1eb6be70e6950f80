"""The ten acceptance criteria, each printed as one PASS/FAIL line in the summary."""
from __future__ import annotations

import io
import random
import time

import pytest

from conftest import record
from tseqmine import baseline
from tseqmine.canonical import (EdgeGraph, canonical_form, code_cmp, is_canonical, is_min_code,
                                min_dfs_code, parent)
from tseqmine.compiler import compile_sequence, decompile
from tseqmine.datagen import GeneratorConfig, generate
from tseqmine.formats import PatternRecord, read_patterns, write_patterns
from tseqmine.matcher import embeddings, support
from tseqmine.model import is_relevant, pattern, tr, union_graph_of_trs
from tseqmine.prefixspan import prefixspan
from tseqmine.reverse import (MinerConfig, MiningStats, convert_plain, mine, project,
                              reassign_and_convert, reconvert)

SKELETON = [tr("ei", 1, 1, (1, 2), "_"), tr("ei", 2, 1, (2, 3), "_")]
N_CONFIGS = 50


def test_criterion_01_two_orders_fixture(two_orders):
    t = time.monotonic()
    got = mine(two_orders, MinerConfig(2))
    secs = time.monotonic() - t
    codes = {m.code for m in got}
    # the two common subsequences whose union graph is two loose vertices
    apart = [pattern([tr("vi", 1, 1, 1, a), tr("vi", 2, 1, 2, b)]) for a, b in (("A", "B"), ("B", "A"))]
    contained = all(support(p, two_orders) == 2 for p in apart)
    excluded = not any(is_relevant(p) for p in apart) and all(len(m.sequence) and is_relevant(m.sequence) for m in got)
    ok = len(got) == 9 and len(codes) == 9 and contained and excluded and secs < 1
    record(1, ok, f"{len(got)} patterns in {secs:.3f}s; disconnected common pair present in data "
                  f"and absent from output: {contained and excluded}")
    assert ok


def _projections(path_projection):
    out = []
    for gid, s in path_projection:
        embs = embeddings(SKELETON, s)
        assert len(embs) == 1
        out.append(project(s, SKELETON, embs, gid))
    return out


def test_criterion_02_annotated_pipeline(path_projection):
    seqs = [x for proj in _projections(path_projection) for x in reassign_and_convert(proj, SKELETON)]
    found = list(prefixspan(seqs, 2))
    got = {tuple(reconvert(el, SKELETON)) for el, _ in found}
    edges = [tr("ei", 2, 1, (1, 2), "_"), tr("ei", 3, 1, (2, 3), "_")]
    want = {tuple(pattern([tr("vi", 1, 1, 1, "A"), *edges])),
            tuple(pattern([tr("vi", 1, 1, 2, "B"), *edges])),
            tuple(pattern([tr("vi", 1, 1, 1, "A"), tr("vi", 1, 2, 2, "B"), *edges]))}
    ok = len(found) == 3 and got == want
    record(2, ok, f"{len(found)} annotated patterns, re-converted set matches: {got == want}")
    assert ok


def test_criterion_03_unannotated_count(path_projection):
    projs = _projections(path_projection)
    plain = len(list(prefixspan([convert_plain(p) for proj in projs for p in proj], 2)))
    annotated = len(list(prefixspan(
        [x for proj in projs for x in reassign_and_convert(proj, SKELETON)], 2)))
    ok = plain == 17 and annotated == 3
    record(3, ok, f"unannotated {plain}, annotated {annotated}")
    assert ok


def _config(i: int):
    r = random.Random(i)
    cfg = GeneratorConfig(db_size=r.randint(10, 50), v_avg=r.randint(3, 5),
                          v_embed_avg=r.choice([2, 3]), n_embedded=r.randint(2, 6),
                          n_labels_v=r.randint(2, 5), n_labels_e=r.randint(2, 5), seed=i)
    return cfg, r.choice([2, 3, 4])


def _parent_violations(result, sigma) -> int:
    found = {m.code: m.support for m in result}
    bad = 0
    for m in result:
        step, p = parent(m.sequence)
        if p is None:
            bad += len(m.sequence) != 1
            continue
        if not is_relevant(p) or not is_canonical(p) or found.get(canonical_form(p).code, 0) < max(sigma, m.support):
            bad += 1
        elif step in (1, 2) and union_graph_of_trs(p) != union_graph_of_trs(canonical_form(m.sequence).sequence):
            bad += 1
    return bad


@pytest.fixture(scope="module")
def desk_runs():
    """Both miners on N_CONFIGS seeded generator configs, with per-run checks."""
    runs = []
    for i in range(N_CONFIGS):
        cfg, sigma = _config(i)
        graphs, _ = generate(cfg)
        db = [(d.gid, compile_sequence(d)) for d in graphs]
        mc = MinerConfig(sigma, max_rules=6)
        st = MiningStats()
        rev = mine(db, mc, stats=st)
        base = baseline.mine(db, mc)
        buf = io.StringIO()
        recs = [PatternRecord(m.sequence, m.support) for m in rev]
        write_patterns(recs, buf)
        text = buf.getvalue()
        again = io.StringIO()
        write_patterns(read_patterns(text), again)
        runs.append(dict(
            cfg=cfg, sigma=sigma, n=len(rev),
            equal={(m.code, m.support) for m in rev} == {(m.code, m.support) for m in base},
            emitted=st.emitted, distinct=len({m.code for m in rev}),
            parent_bad=_parent_violations(rev, sigma),
            replay_ok=all(decompile(s, gid=g) == d for (g, s), d in zip(db, graphs)),
            pattern_io_ok=read_patterns(text) == recs and again.getvalue() == text,
        ))
    return runs


def test_criterion_04_oracle_equivalence(desk_runs):
    bad = [r["cfg"].seed for r in desk_runs if not r["equal"]]
    ok = len(desk_runs) >= 50 and not bad and all(
        r["cfg"].db_size <= 50 and r["cfg"].v_avg <= 5 and r["sigma"] in (2, 3, 4) for r in desk_runs)
    total = sum(r["n"] for r in desk_runs)
    record(4, ok, f"{len(desk_runs)} configs, {total} patterns, mismatching seeds: {bad}")
    assert ok


def test_criterion_05_no_duplicates(desk_runs):
    bad = [r["cfg"].seed for r in desk_runs if not r["emitted"] == r["distinct"] == r["n"]]
    record(5, not bad, f"emissions equal distinct outputs in all runs; offending seeds: {bad}")
    assert not bad


def test_criterion_06_parent_structure(desk_runs):
    violations = sum(r["parent_bad"] for r in desk_runs)
    checked = sum(r["n"] for r in desk_runs)
    record(6, violations == 0, f"{checked} patterns checked, {violations} violations")
    assert violations == 0


def test_criterion_07_round_trips(desk_runs):
    replay = all(r["replay_ok"] for r in desk_runs)
    pio = all(r["pattern_io_ok"] for r in desk_runs)
    record(7, replay and pio, f"compile/decompile identity: {replay}; pattern file identity: {pio}")
    assert replay and pio


def test_criterion_08_planted_recall():
    cfg = GeneratorConfig(db_size=100, n_embedded=5, v_avg=5, seed=2)
    graphs, planted = generate(cfg)
    db = [(d.gid, compile_sequence(d)) for d in graphs]
    mc = MinerConfig(0.1)
    sigma = mc.absolute_support(len(db))
    found = {m.code for m in mine(db, mc)}
    due = [p for p in planted if support(p, db) >= sigma]
    missed = [p for p in due if canonical_form(p).code not in found]
    ok = bool(due) and not missed
    record(8, ok, f"{len(due)} of {len(planted)} planted patterns reach support {sigma}; "
                  f"recalled {len(due) - len(missed)}")
    assert ok


CRIT9_SEED = 1


def test_criterion_09_relative_efficiency():
    cfg = GeneratorConfig(db_size=200, v_avg=5, seed=CRIT9_SEED)
    graphs, _ = generate(cfg)
    db = [(d.gid, compile_sequence(d)) for d in graphs]
    mc = MinerConfig(0.1)
    rs, bs = MiningStats(), MiningStats()
    rev = mine(db, mc, stats=rs)
    fts = baseline.mine_all_fts(db, mc, bs)
    ratio = baseline.irrelevance_ratio(fts)
    same = {m.code for m in rev} == {m.code for m in baseline.filter_relevant(fts)}
    ok = rs.candidates < bs.candidates and ratio > 0.5 and same
    record(9, ok, f"seed {CRIT9_SEED}: candidates {rs.candidates} vs {bs.candidates}, "
                  f"irrelevance ratio {ratio:.3f}, outputs equal: {same}")
    assert ok


# the traversal codes printed for the worked DFS-code example
ALPHA = [(1, 2, "a"), (2, 3, "b"), (3, 1, "a"), (3, 4, "c"), (4, 2, "b"), (2, 5, "d")]
BETA = [(1, 2, "d"), (2, 3, "b"), (3, 4, "a"), (4, 2, "a"), (3, 5, "c"), (5, 2, "b")]
GAMMA = [(1, 2, "a"), (2, 3, "a"), (3, 1, "b"), (3, 4, "d"), (3, 5, "b"), (5, 1, "c")]


def test_criterion_10_dfs_code_order():
    ordered = code_cmp(GAMMA, ALPHA) < 0 < code_cmp(BETA, ALPHA)
    g = EdgeGraph({(i, j): lab for i, j, lab in ALPHA})
    best, _ = min_dfs_code(g)
    gamma_min = is_min_code(GAMMA, g)
    record(10, ordered and gamma_min,
           f"gamma < alpha < beta: {ordered}; printed gamma is the minimum code: {gamma_min} "
           f"(minimum found: {best[3:]} as its last three tuples)")
    assert ordered


@pytest.mark.xfail(strict=True, reason="the printed gamma is a valid DFS code of the graph but "
                                       "not its minimum; a code with (3,4,b) as 4th tuple is smaller")
def test_criterion_10_printed_gamma_is_canonical():
    g = EdgeGraph({(i, j): lab for i, j, lab in ALPHA})
    assert is_min_code(GAMMA, g)
