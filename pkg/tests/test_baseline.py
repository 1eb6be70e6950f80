from hypothesis import given, settings, strategies as st

from conftest import all_subsequences, random_db
from tseqmine import baseline
from tseqmine.canonical import generic_code
from tseqmine.matcher import support
from tseqmine.model import is_relevant, pattern, tr
from tseqmine.reverse import MinerConfig


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 3))
def test_all_fts_equals_exhaustive_subsequences(seed, sigma):
    db = random_db(seed, size=3, n_states=3, edits=3)
    cap = 3
    expected = {}
    for code, p in all_subsequences(db, cap).items():
        sup = support(p, db)
        if sup >= sigma:
            expected[code] = sup
    got = {generic_code(f.sequence): f.support
           for f in baseline.mine_all_fts(db, MinerConfig(sigma, max_rules=cap))}
    assert got == expected


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_all_fts_is_closed_under_tail_truncation(seed):
    db = random_db(seed, size=4)
    fts = baseline.mine_all_fts(db, MinerConfig(2, max_rules=4))
    codes = {generic_code(f.sequence): f.support for f in fts}
    for f in fts:
        if len(f.sequence) > 1:
            shorter = pattern(list(f.sequence)[:-1])
            assert codes[generic_code(shorter)] >= f.support


def test_filter_relevant_drops_disconnected_patterns(two_orders):
    fts = baseline.mine_all_fts(two_orders, MinerConfig(2))
    codes = {generic_code(f.sequence) for f in fts}
    for order in (("A", "B"), ("B", "A")):
        apart = pattern([tr("vi", 1, 1, 1, order[0]), tr("vi", 2, 1, 2, order[1])])
        assert generic_code(apart) in codes
    rel = baseline.filter_relevant(fts)
    assert len(rel) == 9
    assert all(is_relevant(m.sequence) for m in rel)
    assert len(fts) - len(rel) == sum(not is_relevant(f.sequence) for f in fts)


def test_irrelevance_ratio(two_orders):
    fts = baseline.mine_all_fts(two_orders, MinerConfig(2))
    assert baseline.irrelevance_ratio(fts) == (len(fts) - 9) / len(fts)
    assert baseline.irrelevance_ratio([]) == 0.0


def test_irrelevance_ratio_of_single_vertex_database():
    from tseqmine.model import TransformationSequence
    s = TransformationSequence((tr("vi", 1, 1, 1, "A"), tr("vr", 2, 1, 1, "B")), states=2)
    fts = baseline.mine_all_fts([("a", s), ("b", s)], MinerConfig(2))
    assert len(fts) == 3
    assert baseline.irrelevance_ratio(fts) == 0.0


def test_parallel_baseline_matches_serial():
    db = random_db(11, size=5)
    cfg = MinerConfig(2, max_rules=4)
    serial = baseline.mine(db, cfg)
    par = baseline.mine(db, cfg, jobs=2)
    assert [(m.code, m.support) for m in serial] == [(m.code, m.support) for m in par]
