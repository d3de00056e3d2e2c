"""Pure-Python search kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``RAINBOWAP_PUREPY=1`` is set.

Shared layout: ``m`` positions colored in ascending order with colors
``0..r-1``.  Constraint sets of size ``k`` are stored flattened in
``members`` (position indices), sorted by their largest position;
``ptr[p]:ptr[p+1]`` slices the sets whose largest position is ``p``.  A set is
violated when its ``k`` colors are pairwise distinct.
"""
from __future__ import annotations

from typing import Sequence


def _sets_ending(ptr, members, k):
    out = []
    for p in range(len(ptr) - 1):
        out.append([tuple(members[j * k:(j + 1) * k]) for j in range(ptr[p], ptr[p + 1])])
    return out


def brute_force(m: int, r: int, k: int, ptr: Sequence[int], members: Sequence[int],
                prefix: Sequence[int], node_limit: int):
    """Test every completion of ``prefix``; histogram of free colorings by colors used."""
    sets = [tuple(members[j * k:(j + 1) * k]) for j in range(len(members) // k)]
    hist = [0] * (r + 1)
    col = list(prefix) + [0] * (m - len(prefix))
    p0 = len(prefix)
    nodes = 0
    while True:
        nodes += 1
        if nodes > node_limit:
            return hist, nodes, True
        for s in sets:
            if len({col[i] for i in s}) == k:
                break
        else:
            hist[len(set(col))] += 1
        # odometer, last position fastest
        p = m - 1
        while p >= p0:
            col[p] += 1
            if col[p] < r:
                break
            col[p] = 0
            p -= 1
        if p < p0:
            return hist, nodes, False


def pruned(m: int, r: int, k: int, ptr: Sequence[int], members: Sequence[int],
           prefix: Sequence[int], node_limit: int):
    """Backtracking count of free completions of a free ``prefix``."""
    ending = _sets_ending(ptr, members, k)
    col = list(prefix) + [0] * (m - len(prefix))
    nodes = 0
    aborted = False

    def rec(p: int) -> int:
        nonlocal nodes, aborted
        if p == m:
            return 1
        total = 0
        here = ending[p]
        for c in range(r):
            col[p] = c
            if any(len({col[i] for i in s}) == k for s in here):
                continue
            nodes += 1
            if nodes > node_limit:
                aborted = True
                return total
            total += rec(p + 1)
            if aborted:
                return total
        return total

    count = rec(len(prefix))
    return count, nodes, aborted


def canonical(m: int, r: int, k: int, ptr: Sequence[int], members: Sequence[int],
              prefix: Sequence[int], node_limit: int):
    """Count free colorings in first-use canonical form, bucketed by colors used."""
    ending = _sets_ending(ptr, members, k)
    col = list(prefix) + [0] * (m - len(prefix))
    counts = [0] * (r + 1)
    nodes = 0
    aborted = False

    def rec(p: int, used: int) -> None:
        nonlocal nodes, aborted
        if p == m:
            counts[used] += 1
            return
        here = ending[p]
        for c in range(min(used + 1, r)):
            col[p] = c
            if any(len({col[i] for i in s}) == k for s in here):
                continue
            nodes += 1
            if nodes > node_limit:
                aborted = True
                return
            rec(p + 1, used + (c == used))
            if aborted:
                return

    rec(len(prefix), max(prefix) + 1 if prefix else 0)
    return counts, nodes, aborted


def _proper_colorings(verts: list[int], adj: list[int], r: int, counter: list[int]) -> int:
    """Proper r-colorings of the graph induced on ``verts`` (canonical search)."""
    nv = len(verts)
    by_used = [0] * (r + 1)
    col = {}

    def rec(t: int, used: int, done: int) -> None:
        if t == nv:
            by_used[used] += 1
            return
        v = verts[t]
        forb = 0
        nb = adj[v] & done
        while nb:
            low = nb & -nb
            forb |= 1 << col[low.bit_length() - 1]
            nb ^= low
        for c in range(min(used + 1, r)):
            if forb >> c & 1:
                continue
            counter[0] += 1
            col[v] = c
            rec(t + 1, used + (c == used), done | (1 << v))

    rec(0, 0, 0)
    total, falling = 0, 1
    for j in range(1, r + 1):
        falling *= r - j + 1
        total += by_used[j] * falling
    return total + by_used[0]


def ie(m: int, r: int, k: int, members: Sequence[int], decisions: Sequence[int],
       node_limit: int):
    """Signed inclusion-exclusion sum over families of constraint sets.

    Each family ``F`` contributes ``(-1)^|F|`` times the number of colorings
    that make every set of ``F`` rainbow.  ``decisions`` fixes the
    include/exclude choice of the first few sets (a shard).
    """
    nsets = len(members) // k
    smask = []
    for j in range(nsets):
        mask = 0
        for i in members[j * k:(j + 1) * k]:
            mask |= 1 << i
        smask.append(mask)
    counter = [0]
    total = 0
    aborted = False

    def include(adj: list[int], j: int) -> list[int]:
        adj = adj[:]
        s = smask[j]
        for i in members[j * k:(j + 1) * k]:
            adj[i] |= s & ~(1 << i)
        return adj

    def rec(j: int, adj: list[int], vmask: int, sign: int) -> None:
        nonlocal total, aborted
        if aborted:
            return
        if j == nsets:
            counter[0] += 1
            verts = [i for i in range(m) if vmask >> i & 1]
            total += sign * _proper_colorings(verts, adj, r, counter) * r ** (m - len(verts))
            if counter[0] > node_limit:
                aborted = True
            return
        rec(j + 1, adj, vmask, sign)
        rec(j + 1, include(adj, j), vmask | smask[j], -sign)

    adj = [0] * m
    vmask, sign = 0, 1
    for j, take in enumerate(decisions):
        if take:
            adj = include(adj, j)
            vmask |= smask[j]
            sign = -sign
    rec(len(decisions), adj, vmask, sign)
    return total, counter[0], aborted
