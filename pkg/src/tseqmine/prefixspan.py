"""PrefixSpan over itemset sequences with per-group support.

Support counts distinct group keys, not sequences: one data sequence may
contribute several itemset sequences (one per embedding) under the same key.
Items are rank-encoded to ints and handed to the selected kernel.
"""
from __future__ import annotations

from typing import Hashable, Iterator, NamedTuple, Sequence

from .kernels import span

Element = tuple  # sorted items
Pattern = tuple  # tuple of elements


class ItemsetSequence(NamedTuple):
    group: Hashable
    itemsets: tuple[frozenset, ...]


class Counter:
    """Candidate counter shared with the miners' statistics."""

    def __init__(self):
        self.candidates = 0


def encode(seqs: Sequence[ItemsetSequence]):
    """Kernel input: (int sequences, group ints, alphabet), groups made adjacent."""
    alphabet = sorted({x for s in seqs for itemset in s.itemsets for x in itemset})
    rank = {x: i for i, x in enumerate(alphabet)}
    gid: dict = {}
    for s in seqs:
        gid.setdefault(s.group, len(gid))
    order = sorted(range(len(seqs)), key=lambda i: gid[seqs[i].group])
    coded = [[sorted(rank[x] for x in itemset) for itemset in seqs[i].itemsets] for i in order]
    return coded, [gid[seqs[i].group] for i in order], alphabet


def prefixspan(seqs: Sequence[ItemsetSequence], min_support: int,
               max_items: int | None = None,
               counter: Counter | None = None) -> Iterator[tuple[Pattern, int]]:
    """Yield every frequent itemset-sequence pattern with its support.

    Items must be mutually comparable. Patterns come depth first, children of
    a pattern in item order, itemset extensions before sequence extensions.
    """
    if max_items is not None and max_items < 1:
        return
    coded, groups, alphabet = encode(seqs)
    out, candidates = span(coded, groups, len(alphabet), max(1, min_support),
                           -1 if max_items is None else max_items)
    if counter is not None:
        counter.candidates += candidates
    for pat, sup in out:
        yield tuple(tuple(alphabet[x] for x in element) for element in pat), sup


def contains_pattern(itemsets: Sequence[frozenset], pat: Pattern) -> bool:
    """Greedy containment test of an itemset-sequence pattern (used as an oracle)."""
    t = 0
    for element in pat:
        while t < len(itemsets) and not set(element) <= itemsets[t]:
            t += 1
        if t == len(itemsets):
            return False
        t += 1
    return True
