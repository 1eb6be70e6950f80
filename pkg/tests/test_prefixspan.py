import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from tseqmine import _span_py, kernels
from tseqmine.prefixspan import Counter, ItemsetSequence, contains_pattern, encode, prefixspan

try:
    from tseqmine import _span
except ImportError:  # pragma: no cover - depends on the build
    _span = None


def _random_seqs(rng, n=5, alpha="abcd", groups=3):
    out = []
    for _ in range(n):
        sets = tuple(frozenset(rng.sample(alpha, rng.randint(1, 3))) for _ in range(rng.randint(0, 4)))
        out.append(ItemsetSequence(rng.randrange(groups), sets))
    return out


def _brute(seqs, min_support, max_items):
    """Support of every pattern with at most max_items items, by containment tests."""
    alphabet = sorted({x for s in seqs for i in s.itemsets for x in i})
    elements = [c for n in range(1, max_items + 1) for c in itertools.combinations(alphabet, n)]
    out = {}
    frontier = [()]
    while frontier:
        nxt = []
        for pat in frontier:
            for el in elements:
                cand = pat + (el,)
                if sum(len(e) for e in cand) > max_items:
                    continue
                sup = len({s.group for s in seqs if contains_pattern(s.itemsets, cand)})
                if sup >= min_support:
                    out[cand] = sup
                    nxt.append(cand)
        frontier = nxt
    return out


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 4))
def test_prefixspan_matches_brute_force(seed, min_support, max_items):
    seqs = _random_seqs(random.Random(seed))
    got = list(prefixspan(seqs, min_support, max_items))
    assert len(got) == len({p for p, _ in got})
    assert dict(got) == _brute(seqs, min_support, max_items)


@pytest.mark.skipif(_span is None, reason="compiled kernel not built")
@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_compiled_kernel_equals_python_kernel(seed):
    rng = random.Random(seed)
    seqs = _random_seqs(rng, n=rng.randint(1, 8), groups=rng.randint(1, 5))
    coded, groups, alphabet = encode(seqs)
    for min_support in (1, 2, 3):
        for max_items in (1, 3, 5):
            args = (coded, groups, len(alphabet), min_support, max_items)
            assert _span.span(*args) == _span_py.span(*args)


def test_encode_makes_groups_adjacent():
    seqs = [ItemsetSequence("b", (frozenset("x"),)), ItemsetSequence("a", (frozenset("y"),)),
            ItemsetSequence("b", (frozenset("xy"),))]
    coded, groups, alphabet = encode(seqs)
    assert alphabet == ["x", "y"]
    assert groups == [0, 0, 1]
    assert coded == [[[0]], [[0, 1]], [[1]]]


def test_support_counts_groups_not_sequences():
    seqs = [ItemsetSequence("g", (frozenset("a"),)), ItemsetSequence("g", (frozenset("a"),))]
    assert list(prefixspan(seqs, 1)) == [((("a",),), 1)]
    assert list(prefixspan(seqs, 2)) == []


def test_candidate_counter_and_cap():
    seqs = [ItemsetSequence(i, (frozenset("ab"), frozenset("a"))) for i in range(2)]
    c = Counter()
    got = list(prefixspan(seqs, 2, max_items=2, counter=c))
    assert [p for p, _ in got] == [(("a",),), (("a", "b"),), (("a",), ("a",)),
                                   (("b",),), (("b",), ("a",))]
    assert c.candidates > 0
    assert list(prefixspan(seqs, 2, max_items=0)) == []


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")
    if _span is not None:
        assert kernels.BACKEND == "cython" or kernels.span is _span_py.span


def test_pure_backend_can_be_forced():
    import os
    import subprocess
    import sys
    env = dict(os.environ, TSEQMINE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import tseqmine; print(tseqmine.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
