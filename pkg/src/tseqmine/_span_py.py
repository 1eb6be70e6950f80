"""Pure-Python PrefixSpan over integer-coded itemset sequences.

Mirror of the compiled ``_span`` module, used when it is not built. Sequences
are grouped (equal groups adjacent), items are ints in ``[0, alpha)`` and
every itemset is sorted.
"""
from __future__ import annotations


def span(seqs, groups, alpha, min_support, max_items=-1):
    """Frequent sequential patterns as ``(pattern, support)`` plus the candidate count."""
    out: list = []
    if not seqs or alpha == 0 or max_items == 0:
        return out, 0
    sets = [[frozenset(itemset) for itemset in s] for s in seqs]
    counter = [0]
    # an entry is (sequence, itemsets holding the whole last element); at the
    # root the single match is a sentinel just before the sequence
    entries = [(i, (-1,)) for i in range(len(seqs))]
    _grow(seqs, sets, groups, min_support, max_items, entries, -1, 0, (), out, counter)
    return out, counter[0]


def _grow(seqs, sets, groups, min_support, max_items, entries, top, size, prefix, out, counter):
    if max_items >= 0 and size >= max_items:
        return
    s_cnt: dict[int, int] = {}
    s_last: dict[int, int] = {}
    i_cnt: dict[int, int] = {}
    i_last: dict[int, int] = {}
    for s, matches in entries:
        g = groups[s]
        seq = seqs[s]
        for t in range(matches[0] + 1, len(seq)):
            for x in seq[t]:
                if s_last.get(x) != g:
                    s_last[x] = g
                    s_cnt[x] = s_cnt.get(x, 0) + 1
        if top >= 0:
            for t in matches:
                for x in seq[t]:
                    if x > top and i_last.get(x) != g:
                        i_last[x] = g
                        i_cnt[x] = i_cnt.get(x, 0) + 1
    counter[0] += len(s_cnt) + len(i_cnt)
    if top >= 0:
        last = prefix[-1]
        for x in sorted(i_cnt):
            if i_cnt[x] < min_support:
                continue
            new = []
            for s, matches in entries:
                ms = tuple(t for t in matches if x in sets[s][t])
                if ms:
                    new.append((s, ms))
            child = prefix[:-1] + (last + (x,),)
            out.append((child, i_cnt[x]))
            _grow(seqs, sets, groups, min_support, max_items, new, x, size + 1, child, out, counter)
    for x in sorted(s_cnt):
        if s_cnt[x] < min_support:
            continue
        new = []
        for s, matches in entries:
            ms = tuple(t for t in range(matches[0] + 1, len(seqs[s])) if x in sets[s][t])
            if ms:
                new.append((s, ms))
        child = prefix + ((x,),)
        out.append((child, s_cnt[x]))
        _grow(seqs, sets, groups, min_support, max_items, new, x, size + 1, child, out, counter)
