# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled PrefixSpan over integer-coded itemset sequences.

Same contract as ``_span_py.span``: sequences are grouped (all sequences of a
group adjacent), items are ints in ``[0, alpha)``, every itemset is sorted.
"""
from libc.stdlib cimport calloc, free, malloc


cdef struct Data:
    int *seq_start   # first global itemset index of each sequence, n_seq + 1 entries
    int *set_start   # first item index of each itemset, n_sets + 1 entries
    int *items
    int *group       # group of each sequence
    int alpha
    int min_support
    int max_items
    long candidates


cdef inline bint has_item(Data *d, int t, int x) nogil:
    cdef int lo = d.set_start[t]
    cdef int hi = d.set_start[t + 1] - 1
    cdef int mid
    while lo <= hi:
        mid = (lo + hi) >> 1
        if d.items[mid] == x:
            return True
        if d.items[mid] < x:
            lo = mid + 1
        else:
            hi = mid - 1
    return False


cdef int grow(Data *d, int n_ent, int *e_seq, int *e_off, int *e_match,
              int top, int size, tuple prefix, list out) except -1:
    # e_match[e_off[i]:e_off[i + 1]] are the itemsets of entry i holding the
    # whole last element; at the root it is one sentinel before the sequence
    if d.max_items >= 0 and size >= d.max_items:
        return 0
    cdef int alpha = d.alpha
    cdef int *s_cnt = <int *> calloc(alpha, sizeof(int))
    cdef int *s_last = <int *> calloc(alpha, sizeof(int))
    cdef int *i_cnt = <int *> calloc(alpha, sizeof(int))
    cdef int *i_last = <int *> calloc(alpha, sizeof(int))
    cdef int *n_seq_ = NULL
    cdef int *n_off = NULL
    cdef int *n_match = NULL
    cdef int i, t, p, x, g, s, m0, end, n_new, k, bound_s, bound_i
    cdef tuple last, child
    if s_cnt == NULL or s_last == NULL or i_cnt == NULL or i_last == NULL:
        free(s_cnt); free(s_last); free(i_cnt); free(i_last)
        raise MemoryError()
    try:
        bound_s = 0
        for i in range(n_ent):
            s = e_seq[i]
            g = d.group[s] + 1
            m0 = e_match[e_off[i]]
            end = d.seq_start[s + 1]
            bound_s += end - m0 - 1
            for t in range(m0 + 1, end):
                for p in range(d.set_start[t], d.set_start[t + 1]):
                    x = d.items[p]
                    if s_last[x] != g:
                        s_last[x] = g
                        s_cnt[x] += 1
            if top >= 0:
                for k in range(e_off[i], e_off[i + 1]):
                    t = e_match[k]
                    for p in range(d.set_start[t], d.set_start[t + 1]):
                        x = d.items[p]
                        if x > top and i_last[x] != g:
                            i_last[x] = g
                            i_cnt[x] += 1
        for x in range(alpha):
            if s_cnt[x]:
                d.candidates += 1
            if i_cnt[x]:
                d.candidates += 1
        bound_i = e_off[n_ent]
        n_seq_ = <int *> malloc((n_ent + 1) * sizeof(int))
        n_off = <int *> malloc((n_ent + 1) * sizeof(int))
        n_match = <int *> malloc((max(bound_s, bound_i) + 1) * sizeof(int))
        if n_seq_ == NULL or n_off == NULL or n_match == NULL:
            raise MemoryError()

        if top >= 0:
            last = prefix[len(prefix) - 1]
            for x in range(top + 1, alpha):
                if i_cnt[x] < d.min_support:
                    continue
                n_new = 0
                k = 0
                n_off[0] = 0
                for i in range(n_ent):
                    p = k
                    for m0 in range(e_off[i], e_off[i + 1]):
                        t = e_match[m0]
                        if has_item(d, t, x):
                            n_match[k] = t
                            k += 1
                    if k > p:
                        n_seq_[n_new] = e_seq[i]
                        n_new += 1
                        n_off[n_new] = k
                child = prefix[:len(prefix) - 1] + (last + (x,),)
                out.append((child, i_cnt[x]))
                grow(d, n_new, n_seq_, n_off, n_match, x, size + 1, child, out)

        for x in range(alpha):
            if s_cnt[x] < d.min_support:
                continue
            n_new = 0
            k = 0
            n_off[0] = 0
            for i in range(n_ent):
                s = e_seq[i]
                p = k
                for t in range(e_match[e_off[i]] + 1, d.seq_start[s + 1]):
                    if has_item(d, t, x):
                        n_match[k] = t
                        k += 1
                if k > p:
                    n_seq_[n_new] = s
                    n_new += 1
                    n_off[n_new] = k
            child = prefix + ((x,),)
            out.append((child, s_cnt[x]))
            grow(d, n_new, n_seq_, n_off, n_match, x, size + 1, child, out)
    finally:
        free(s_cnt); free(s_last); free(i_cnt); free(i_last)
        free(n_seq_); free(n_off); free(n_match)
    return 0


def span(list seqs, list groups, int alpha, int min_support, int max_items=-1):
    """Frequent sequential patterns as ``(pattern, support)`` plus the candidate count.

    ``seqs[i]`` is a list of sorted int lists, ``groups[i]`` its group number;
    equal groups must be adjacent. ``max_items < 0`` means no cap.
    """
    cdef Data d
    cdef int n_seq = len(seqs)
    cdef int n_sets = 0, n_items = 0, i, t, c
    cdef list out = []
    if n_seq == 0 or alpha == 0 or max_items == 0:
        return out, 0
    for s in seqs:
        n_sets += len(s)
        for itemset in s:
            n_items += len(itemset)
    d.seq_start = <int *> malloc((n_seq + 1) * sizeof(int))
    d.set_start = <int *> malloc((n_sets + 1) * sizeof(int))
    d.items = <int *> malloc((n_items + 1) * sizeof(int))
    d.group = <int *> malloc((n_seq + 1) * sizeof(int))
    cdef int *e_seq = <int *> malloc((n_seq + 1) * sizeof(int))
    cdef int *e_off = <int *> malloc((n_seq + 1) * sizeof(int))
    cdef int *e_match = <int *> malloc((n_seq + 1) * sizeof(int))
    try:
        if (d.seq_start == NULL or d.set_start == NULL or d.items == NULL or d.group == NULL
                or e_seq == NULL or e_off == NULL or e_match == NULL):
            raise MemoryError()
        t = 0
        c = 0
        for i in range(n_seq):
            d.seq_start[i] = t
            d.group[i] = groups[i]
            for itemset in seqs[i]:
                d.set_start[t] = c
                for x in itemset:
                    d.items[c] = x
                    c += 1
                t += 1
        d.seq_start[n_seq] = t
        d.set_start[t] = c
        d.alpha = alpha
        d.min_support = min_support
        d.max_items = max_items
        d.candidates = 0
        e_off[0] = 0
        for i in range(n_seq):
            e_seq[i] = i
            e_match[i] = d.seq_start[i] - 1
            e_off[i + 1] = i + 1
        grow(&d, n_seq, e_seq, e_off, e_match, -1, 0, (), out)
        return out, d.candidates
    finally:
        free(d.seq_start); free(d.set_start); free(d.items); free(d.group)
        free(e_seq); free(e_off); free(e_match)
