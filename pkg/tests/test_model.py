import pytest

from tseqmine.model import (ABSENT, Kind, LabeledGraph, TransformationRule, edge,
                            is_relevant, pattern, tr, union_graph_of_trs)


def test_edge_is_normalised():
    assert edge(3, 1) == (1, 3)
    assert tr("ei", 1, 1, (4, 2), "x").target == (2, 4)


@pytest.mark.parametrize("args", [
    ("vi", 1, 1, (1, 2), "A"),     # vertex kind on an edge
    ("ei", 1, 1, 1, "x"),          # edge kind on a vertex
    ("vd", 1, 1, 1, "A"),          # deletions carry no label
    ("vi", 1, 1, 1, ABSENT),       # insertions do
    ("vi", 0, 1, 1, "A"),          # interstates start at 1
])
def test_rule_validation(args):
    with pytest.raises(ValueError):
        tr(*args)


def test_kind_text_round_trip():
    for k in Kind:
        assert Kind.parse(str(k)) is k


def test_pattern_renumbers_interstates_and_orders_rules():
    p = pattern([tr("ei", 7, 1, (1, 2), "x"), tr("vi", 3, 2, 2, "B"), tr("vi", 3, 1, 1, "A")])
    assert [(r.j, r.k) for r in p] == [(1, 1), (1, 2), (2, 1)]
    assert p.is_pattern


def test_pattern_rejects_duplicate_rules_in_one_interstate():
    with pytest.raises(ValueError):
        pattern([tr("vi", 1, 1, 1, "A"), tr("vi", 1, 2, 1, "A")])


def test_relevance():
    assert is_relevant([tr("vi", 1, 1, 5, "A")])
    assert is_relevant([tr("vi", 1, 1, 5, "A"), tr("vr", 2, 1, 5, "B")])
    assert not is_relevant([tr("vi", 1, 1, 1, "A"), tr("vi", 1, 2, 2, "B")])
    assert is_relevant([tr("vi", 1, 1, 1, "A"), tr("vi", 1, 2, 2, "B"), tr("ei", 2, 1, (1, 2), "x")])
    with pytest.raises(ValueError):
        is_relevant([])


def test_union_graph():
    u = union_graph_of_trs([tr("ei", 1, 1, (1, 2), "x"), tr("vd", 2, 1, 3, ABSENT)])
    assert u.vertices == {1, 2, 3}
    assert u.edges == {(1, 2)}
    assert not u.is_connected()


def test_graph_equality_and_copy():
    g = LabeledGraph({1: "A", 2: "B"}, {(2, 1): "x"})
    h = g.copy()
    assert g == h and g.degree(1) == 1
    h.vertices[3] = "C"
    assert g != h


def test_rule_order_is_positional():
    a = TransformationRule(1, 2, Kind.VI, 1, "A")
    b = TransformationRule(2, 1, Kind.VI, 1, "A")
    assert a < b
