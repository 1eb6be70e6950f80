import io
import random

import pytest

from tseqmine.compiler import compile_sequence, decompile
from tseqmine.datagen import (GenerationError, GeneratorConfig, generate, host_sequence,
                              planted_patterns, poisson_at_least_one)
from tseqmine.formats import write_gsq
from tseqmine.matcher import contains
from tseqmine.model import is_relevant, union_graph_of_sequence

SMALL = GeneratorConfig(db_size=30, n_embedded=4, v_avg=5, seed=7)


def _dump(cfg):
    db, _ = generate(cfg)
    buf = io.StringIO()
    buf.write(cfg.header())
    write_gsq(db, buf)
    return buf.getvalue()


def test_same_seed_same_bytes():
    assert _dump(SMALL) == _dump(SMALL)
    assert _dump(SMALL) != _dump(GeneratorConfig(db_size=30, n_embedded=4, v_avg=5, seed=8))


def test_sequences_do_not_depend_on_database_size():
    big, _ = generate(GeneratorConfig(db_size=40, n_embedded=4, v_avg=5, seed=7))
    small, _ = generate(SMALL)
    assert big[:30] == small


@pytest.mark.parametrize("seed", range(4))
def test_every_sequence_is_relevant_and_round_trips(seed):
    cfg = GeneratorConfig(db_size=40, n_embedded=5, v_avg=5, seed=seed)
    db, planted = generate(cfg)
    assert len(db) == 40 and len(planted) == 5
    for d in db:
        u = union_graph_of_sequence(d)
        assert u.is_connected()
        assert decompile(compile_sequence(d), gid=d.gid) == d


def test_planted_patterns_are_relevant_and_contained_in_their_hosts():
    cfg = GeneratorConfig(db_size=40, n_embedded=5, v_avg=5, seed=3)
    planted = planted_patterns(cfg)
    for _, p in planted:
        assert is_relevant(p)
    for i in range(cfg.db_size):
        rng = random.Random(f"{cfg.seed}:host:{i}")
        poisson_at_least_one(rng, cfg.v_avg)
        chosen = rng.randrange(len(planted))
        assert contains(planted[chosen][1], compile_sequence(host_sequence(cfg, i, planted)))


def test_every_transition_changes_something():
    cfg = GeneratorConfig(db_size=30, n_embedded=3, v_avg=6, seed=1, d_ist=2)
    db, planted = generate(cfg)
    for d in db:
        for a, b in zip(d.interstates, d.interstates[1:]):
            own = [x for x in set(a.vertices) | set(b.vertices) | set(a.edges) | set(b.edges)
                   if (a.vertices if isinstance(x, int) else a.edges).get(x)
                   != (b.vertices if isinstance(x, int) else b.edges).get(x)]
            assert len(own) >= 1


def test_insert_only_single_edit_walk():
    cfg = GeneratorConfig(p_i=1.0, p_d=0.0, d_ist=1, db_size=10, n_embedded=2, v_avg=4, seed=2)
    db, _ = generate(cfg)
    for d in db:
        s = compile_sequence(d)
        for r in s:
            if r.j > 1:
                assert r.kind.name in ("VI", "EI")


def test_average_vertex_count_is_near_target():
    cfg = GeneratorConfig(db_size=300, v_avg=6, seed=0)
    db, _ = generate(cfg)
    mean = sum(len(union_graph_of_sequence(d).vertices) for d in db) / len(db)
    assert 5 <= mean <= 8


def test_poisson_floor():
    rng = random.Random(0)
    draws = [poisson_at_least_one(rng, 0.01) for _ in range(100)]
    assert min(draws) == 1


@pytest.mark.parametrize("kw", [dict(p_i=1.2), dict(p_i=0.7, p_d=0.4), dict(db_size=0),
                                dict(d_ist=0), dict(p_edge=-0.1)])
def test_invalid_configs(kw):
    with pytest.raises(ValueError):
        GeneratorConfig(**kw)


def test_header_names_rng_and_parameters():
    h = SMALL.header()
    assert h.startswith("# tseqmine-datagen/1")
    assert "seed=7" in h and "db_size=30" in h


def test_exhausted_resample_budget_raises():
    # with relabeling only and a single label nothing can ever change
    cfg = GeneratorConfig(p_i=0.0, p_d=0.0, n_labels_v=1, n_labels_e=1, db_size=1,
                          n_embedded=1, v_avg=4, seed=0, max_resample=3)
    with pytest.raises(GenerationError):
        generate(cfg)


def test_planted_support_is_near_one_in_n():
    from tseqmine.matcher import support
    cfg = GeneratorConfig(db_size=100, n_embedded=5, v_avg=5, seed=2)
    graphs, planted = generate(cfg)
    db = [(d.gid, compile_sequence(d)) for d in graphs]
    sups = [support(p, db) for p in planted]
    # each host carries one pattern chosen uniformly, and may contain others by chance
    assert sum(sups) / len(sups) >= 0.75 * cfg.db_size / cfg.n_embedded
    assert sum(sups) >= cfg.db_size
