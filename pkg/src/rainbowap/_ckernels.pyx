# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernels; see ``_pykernels`` for the shared data layout."""

from libc.stdlib cimport malloc, calloc, free
from libc.string cimport memcpy
from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil
    int ctz64 "__builtin_ctzll"(unsigned long long) nogil


ctypedef struct Search:
    int m
    int r
    int k
    int *ptr
    int *members
    int *col
    uint64_t nodes
    uint64_t limit
    int aborted
    uint64_t *counts


cdef inline bint any_rainbow(Search *s, int lo, int hi) noexcept nogil:
    cdef int j, t
    cdef uint64_t mask
    cdef int *mem
    for j in range(lo, hi):
        mem = s.members + j * s.k
        mask = 0
        for t in range(s.k):
            mask |= (<uint64_t>1) << s.col[mem[t]]
        if popcount64(mask) == s.k:
            return True
    return False


cdef int *_int_buffer(object values) except NULL:
    cdef Py_ssize_t n = len(values), i
    cdef int *buf = <int *>malloc((n + 1) * sizeof(int))
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = values[i]
    return buf


cdef void _setup(Search *s, int m, int r, int k, object ptr, object members,
                 object prefix, unsigned long long node_limit) except *:
    s.m = m
    s.r = r
    s.k = k
    s.ptr = _int_buffer(ptr)
    s.members = _int_buffer(members)
    s.col = <int *>calloc(m + 1, sizeof(int))
    s.counts = <uint64_t *>calloc(r + 2, sizeof(uint64_t))
    if s.col == NULL or s.counts == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(len(prefix)):
        s.col[i] = prefix[i]
    s.nodes = 0
    s.limit = node_limit
    s.aborted = 0


cdef void _teardown(Search *s):
    free(s.ptr)
    free(s.members)
    free(s.col)
    free(s.counts)


def brute_force(int m, int r, int k, ptr, members, prefix, unsigned long long node_limit):
    cdef Search s
    _setup(&s, m, r, k, ptr, members, prefix, node_limit)
    cdef int p0 = len(prefix)
    cdef int nsets = len(members) // k
    cdef int p, i
    cdef uint64_t used
    try:
        with nogil:
            while True:
                s.nodes += 1
                if s.nodes > s.limit:
                    s.aborted = 1
                    break
                if not any_rainbow(&s, 0, nsets):
                    used = 0
                    for i in range(m):
                        used |= (<uint64_t>1) << s.col[i]
                    s.counts[popcount64(used)] += 1
                p = m - 1
                while p >= p0:
                    s.col[p] += 1
                    if s.col[p] < r:
                        break
                    s.col[p] = 0
                    p -= 1
                if p < p0:
                    break
        hist = [int(s.counts[i]) for i in range(r + 1)]
        return hist, int(s.nodes), bool(s.aborted)
    finally:
        _teardown(&s)


cdef uint64_t _pruned_rec(Search *s, int p) noexcept nogil:
    if p == s.m:
        return 1
    cdef uint64_t total = 0
    cdef int c
    cdef int lo = s.ptr[p], hi = s.ptr[p + 1]
    for c in range(s.r):
        s.col[p] = c
        if any_rainbow(s, lo, hi):
            continue
        s.nodes += 1
        if s.nodes > s.limit:
            s.aborted = 1
            return total
        total += _pruned_rec(s, p + 1)
        if s.aborted:
            return total
    return total


def pruned(int m, int r, int k, ptr, members, prefix, unsigned long long node_limit):
    cdef Search s
    _setup(&s, m, r, k, ptr, members, prefix, node_limit)
    cdef int p0 = len(prefix)
    cdef uint64_t count
    try:
        with nogil:
            count = _pruned_rec(&s, p0)
        return int(count), int(s.nodes), bool(s.aborted)
    finally:
        _teardown(&s)


cdef void _canonical_rec(Search *s, int p, int used) noexcept nogil:
    if p == s.m:
        s.counts[used] += 1
        return
    cdef int c
    cdef int lo = s.ptr[p], hi = s.ptr[p + 1]
    cdef int top = used + 1 if used + 1 < s.r else s.r
    for c in range(top):
        s.col[p] = c
        if any_rainbow(s, lo, hi):
            continue
        s.nodes += 1
        if s.nodes > s.limit:
            s.aborted = 1
            return
        _canonical_rec(s, p + 1, used + (c == used))
        if s.aborted:
            return


def canonical(int m, int r, int k, ptr, members, prefix, unsigned long long node_limit):
    cdef Search s
    _setup(&s, m, r, k, ptr, members, prefix, node_limit)
    cdef int p0 = len(prefix)
    cdef int used = (max(prefix) + 1) if p0 else 0
    try:
        with nogil:
            _canonical_rec(&s, p0, used)
        counts = [int(s.counts[i]) for i in range(r + 1)]
        return counts, int(s.nodes), bool(s.aborted)
    finally:
        _teardown(&s)


# --- inclusion-exclusion over families of constraint sets -------------------

ctypedef struct Family:
    int m
    int r
    int k
    int nsets
    int *members
    uint64_t *smask
    uint64_t *adj        # (nsets + 1) levels of m adjacency masks
    int *col
    int *verts
    int64_t *falling     # falling[j] = r (r-1) ... (r-j+1)
    int64_t *rpow
    uint64_t *by_used
    uint64_t nodes
    uint64_t limit
    int aborted
    int64_t total


cdef void _color_rec(Family *f, uint64_t *adj, int nv, int t, int used, uint64_t done) noexcept nogil:
    if t == nv:
        f.by_used[used] += 1
        return
    cdef int v = f.verts[t]
    cdef uint64_t nb = adj[v] & done
    cdef uint64_t forb = 0
    while nb:
        forb |= (<uint64_t>1) << f.col[ctz64(nb)]
        nb &= nb - 1
    cdef int c
    cdef int top = used + 1 if used + 1 < f.r else f.r
    for c in range(top):
        if (forb >> c) & 1:
            continue
        f.nodes += 1
        f.col[v] = c
        _color_rec(f, adj, nv, t + 1, used + (c == used), done | ((<uint64_t>1) << v))


cdef int64_t _proper_count(Family *f, uint64_t *adj, uint64_t vmask) noexcept nogil:
    cdef int nv = 0, j
    cdef uint64_t rest = vmask
    while rest:
        f.verts[nv] = ctz64(rest)
        nv += 1
        rest &= rest - 1
    for j in range(f.r + 1):
        f.by_used[j] = 0
    _color_rec(f, adj, nv, 0, 0, 0)
    cdef int64_t total = <int64_t>f.by_used[0]
    for j in range(1, f.r + 1):
        total += <int64_t>f.by_used[j] * f.falling[j]
    return total


cdef void _include(Family *f, int level, int j) noexcept nogil:
    cdef uint64_t *src = f.adj + level * f.m
    cdef uint64_t *dst = f.adj + (level + 1) * f.m
    memcpy(dst, src, f.m * sizeof(uint64_t))
    cdef uint64_t s = f.smask[j]
    cdef int t, i
    for t in range(f.k):
        i = f.members[j * f.k + t]
        dst[i] |= s & ~((<uint64_t>1) << i)


cdef void _family_rec(Family *f, int j, int level, uint64_t vmask, int sign) noexcept nogil:
    if f.aborted:
        return
    cdef uint64_t *adj = f.adj + level * f.m
    if j == f.nsets:
        f.nodes += 1
        f.total += sign * _proper_count(f, adj, vmask) * f.rpow[f.m - popcount64(vmask)]
        if f.nodes > f.limit:
            f.aborted = 1
        return
    _family_rec(f, j + 1, level, vmask, sign)
    # level + 1 is free again once the exclude branch returned
    _include(f, level, j)
    _family_rec(f, j + 1, level + 1, vmask | f.smask[j], -sign)


def ie(int m, int r, int k, members, decisions, unsigned long long node_limit):
    if m > 64:
        raise ValueError("inclusion-exclusion kernel supports at most 64 positions")
    cdef Family f
    cdef int nsets = len(members) // k
    cdef int i, j, start, level = 0
    f.m = m
    f.r = r
    f.k = k
    f.nsets = nsets
    f.members = _int_buffer(members)
    f.smask = <uint64_t *>calloc(nsets + 1, sizeof(uint64_t))
    f.adj = <uint64_t *>calloc((nsets + 2) * (m + 1), sizeof(uint64_t))
    f.col = <int *>calloc(m + 1, sizeof(int))
    f.verts = <int *>calloc(m + 1, sizeof(int))
    f.falling = <int64_t *>calloc(r + 2, sizeof(int64_t))
    f.rpow = <int64_t *>calloc(m + 2, sizeof(int64_t))
    f.by_used = <uint64_t *>calloc(r + 2, sizeof(uint64_t))
    f.nodes = 0
    f.limit = node_limit
    f.aborted = 0
    f.total = 0
    cdef uint64_t vmask = 0
    cdef int sign = 1
    try:
        if (f.smask == NULL or f.adj == NULL or f.col == NULL or f.verts == NULL
                or f.falling == NULL or f.rpow == NULL or f.by_used == NULL):
            raise MemoryError()
        for j in range(nsets):
            for i in range(k):
                f.smask[j] |= (<uint64_t>1) << f.members[j * k + i]
        f.falling[0] = 1
        for j in range(1, r + 1):
            f.falling[j] = f.falling[j - 1] * (r - j + 1)
        f.rpow[0] = 1
        for j in range(1, m + 1):
            f.rpow[j] = f.rpow[j - 1] * r
        for j in range(len(decisions)):
            if decisions[j]:
                _include(&f, level, j)
                level += 1
                vmask |= f.smask[j]
                sign = -sign
        start = len(decisions)
        with nogil:
            _family_rec(&f, start, level, vmask, sign)
        return int(f.total), int(f.nodes), bool(f.aborted)
    finally:
        free(f.members)
        free(f.smask)
        free(f.adj)
        free(f.col)
        free(f.verts)
        free(f.falling)
        free(f.rpow)
        free(f.by_used)
