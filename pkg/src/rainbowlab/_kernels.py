"""Compiled inner loops for the rainbow engine.

Graphs arrive as colored CSR arrays ``(indptr, nbr, cbit)`` where ``cbit`` is
the one-hot ``uint64`` mask of each directed edge's color; a pair that is an
edge in several colors appears once per color. Color sets are ``uint64``
masks.

State storage lives in a caller-owned :class:`Workspace`; kernels report
``OUT_OF_SPACE`` instead of allocating, and the caller grows and retries.
"""

import numpy as np
from numba import njit

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_BIG = np.int64(2**62)

EXHAUSTED = 0
STOPPED = 1
OVER_BUDGET = 2
OUT_OF_SPACE = -1


class Workspace:
    """Reusable scratch arrays for :func:`forward` and friends."""

    def __init__(self, n, capacity=1 << 14):
        self.n = n
        self.head = np.empty(n, dtype=np.int64)
        self.dist = np.empty(n, dtype=np.int64)
        self.need = np.zeros(n, dtype=np.bool_)
        self.common = np.empty(n, dtype=np.uint64)
        self._alloc(capacity)

    def _alloc(self, capacity):
        self.capacity = capacity
        self.store_mask = np.empty(capacity, dtype=np.uint64)
        self.store_next = np.empty(capacity, dtype=np.int64)
        self.fr_v = np.empty(capacity, dtype=np.int64)
        self.fr_m = np.empty(capacity, dtype=np.uint64)
        self.nx_v = np.empty(capacity, dtype=np.int64)
        self.nx_m = np.empty(capacity, dtype=np.uint64)

    def grow(self):
        self._alloc(2 * self.capacity)

    def arrays(self):
        return (
            self.head,
            self.store_mask,
            self.store_next,
            self.fr_v,
            self.fr_m,
            self.nx_v,
            self.nx_m,
        )


@njit(cache=True, nogil=True)
def forward(
    indptr, nbr, cbit, source, allowed, max_t, target, need, n_need, prune, dist, budget,
    head, store_mask, store_next, fr_v, fr_m, nx_v, nx_m,
):
    """Layered DP over ``(vertex, color set)`` states from ``source``.

    Fills ``dist`` with exact rainbow distances using only colors in
    ``allowed`` and at most ``max_t`` steps (``-1`` = not reached). A state
    ``(u, T)`` is dropped when ``u`` already stores a set ``S`` with
    ``S <= T`` (``prune``) or ``S == T`` (no pruning); every vertex still gets
    its exact first-arrival layer.

    Stops with ``STOPPED`` once ``target`` (if ``>= 0``) or all ``n_need``
    vertices flagged in ``need`` (if ``n_need >= 0``) are reached, and with
    ``OVER_BUDGET`` before expanding a frontier of more than ``budget``
    states. Returns ``(status, states_stored)``.
    """
    cap = store_mask.size
    head[:] = -1
    dist[:] = -1
    fr_v[0] = source
    fr_m[0] = _ZERO
    n_fr = 1
    store_mask[0] = _ZERO
    store_next[0] = -1
    head[source] = 0
    n_store = 1
    dist[source] = 0

    remaining = n_need
    if n_need >= 0 and need[source]:
        remaining -= 1
    if remaining == 0 or target == source:
        return STOPPED, n_store

    t = 0
    while n_fr > 0 and t < max_t:
        if n_fr > budget:
            return OVER_BUDGET, n_store
        n_nx = 0
        for i in range(n_fr):
            w = fr_v[i]
            used = fr_m[i]
            for e in range(indptr[w], indptr[w + 1]):
                b = cbit[e]
                if (b & allowed) == _ZERO or (b & used) != _ZERO:
                    continue
                u = nbr[e]
                grown = used | b
                k = head[u]
                dominated = False
                while k != -1:
                    m = store_mask[k]
                    if prune:
                        if (m & ~grown) == _ZERO:
                            dominated = True
                            break
                    elif m == grown:
                        dominated = True
                        break
                    k = store_next[k]
                if dominated:
                    continue
                if n_store == cap:
                    return OUT_OF_SPACE, n_store
                store_mask[n_store] = grown
                store_next[n_store] = head[u]
                head[u] = n_store
                n_store += 1
                nx_v[n_nx] = u
                nx_m[n_nx] = grown
                n_nx += 1
                if dist[u] < 0:
                    dist[u] = t + 1
                    if u == target:
                        return STOPPED, n_store
                    if remaining > 0 and need[u]:
                        remaining -= 1
                        if remaining == 0:
                            return STOPPED, n_store
        fr_v, nx_v = nx_v, fr_v
        fr_m, nx_m = nx_m, fr_m
        n_fr = n_nx
        t += 1
    return EXHAUSTED, n_store


@njit(cache=True, nogil=True)
def _meets(head, store_mask, store_next, w, used):
    """True if some stored set at ``w`` is disjoint from ``used``."""
    k = head[w]
    while k != -1:
        if (store_mask[k] & used) == _ZERO:
            return True
        k = store_next[k]
    return False


@njit(cache=True, nogil=True)
def first_unreachable(
    indptr, nbr, cbit, source, allowed, max_t, budget, need, dist, common,
    head, store_mask, store_next, fr_v, fr_m, nx_v, nx_m,
):
    """Smallest ``x > source`` with no rainbow path from ``source``.

    Returns ``-1`` if there is none, or ``-2`` when the workspace is full.

    The forward search stops before any layer wider than ``budget`` states.
    A target it has not reached is then settled by meeting in the middle: a
    walk of one or two edges from the target whose colors avoid some stored
    forward set at its far end closes a rainbow walk, and a rainbow walk
    always contains a rainbow path. Targets left over go to a full search.
    """
    n = indptr.size - 1
    need[:] = False
    n_need = n - 1 - source
    if n_need <= 0:
        return -1
    need[source + 1 :] = True
    status, _ = forward(
        indptr, nbr, cbit, source, allowed, max_t, -1, need, n_need, True, dist, budget,
        head, store_mask, store_next, fr_v, fr_m, nx_v, nx_m,
    )
    if status == OUT_OF_SPACE:
        return -2
    if status == STOPPED:
        return -1
    if status == EXHAUSTED:
        for x in range(source + 1, n):
            if dist[x] < 0:
                return x
        return -1

    # common[w] is the AND of the sets stored at w: a color absent from it
    # is absent from at least one stored set
    common[:] = ~_ZERO
    for w in range(n):
        k = head[w]
        while k != -1:
            common[w] &= store_mask[k]
            k = store_next[k]

    n_left = 0
    for x in range(source + 1, n):
        need[x] = False
        if dist[x] >= 0:
            continue
        found = False
        for e in range(indptr[x], indptr[x + 1]):
            bj = cbit[e]
            if (bj & allowed) != _ZERO and (common[nbr[e]] & bj) == _ZERO:
                found = True
                break
        if not found:
            for e in range(indptr[x], indptr[x + 1]):
                bj = cbit[e]
                if (bj & allowed) == _ZERO:
                    continue
                y = nbr[e]
                for f in range(indptr[y], indptr[y + 1]):
                    bk = cbit[f]
                    if (bk & allowed) == _ZERO or bk == bj:
                        continue
                    w = nbr[f]
                    if (common[w] & (bj | bk)) != _ZERO:
                        continue
                    if _meets(head, store_mask, store_next, w, bj | bk):
                        found = True
                        break
                if found:
                    break
        if not found:
            need[x] = True
            n_left += 1
    if n_left == 0:
        return -1
    status, _ = forward(
        indptr, nbr, cbit, source, allowed, max_t, -1, need, n_left, True, dist, _BIG,
        head, store_mask, store_next, fr_v, fr_m, nx_v, nx_m,
    )
    if status == OUT_OF_SPACE:
        return -2
    for x in range(source + 1, n):
        if need[x] and dist[x] < 0:
            return x
    return -1


@njit(cache=True, nogil=True)
def connectivity_scan(
    indptr, nbr, cbit, allowed, max_t, budget, start, need, dist, common,
    head, store_mask, store_next, fr_v, fr_m, nx_v, nx_m,
):
    """Run :func:`first_unreachable` for sources ``start, start+1, ...``.

    Returns ``(source, target)`` for the first failing pair, ``(-1, -1)`` if
    every pair is joined, or ``(source, -2)`` if ``source`` ran out of space.
    """
    n = indptr.size - 1
    for source in range(start, n - 1):
        x = first_unreachable(
            indptr, nbr, cbit, source, allowed, max_t, budget, need, dist, common,
            head, store_mask, store_next, fr_v, fr_m, nx_v, nx_m,
        )
        if x != -1:
            return source, x
    return -1, -1


@njit(cache=True, nogil=True)
def bfs_distances(indptr, indices, source, dist, queue):
    """Plain BFS; fills ``dist`` (pre-set to -1) and returns the number reached."""
    head = 0
    tail = 1
    queue[0] = source
    dist[source] = 0
    while head < tail:
        w = queue[head]
        head += 1
        dw = dist[w] + 1
        for e in range(indptr[w], indptr[w + 1]):
            u = indices[e]
            if dist[u] < 0:
                dist[u] = dw
                queue[tail] = u
                tail += 1
    return tail


@njit(cache=True, nogil=True)
def diameter(indptr, indices):
    """Exact diameter, -1 when disconnected.

    Runs BFS from 64 sources at a time, one bit per source, so each level is
    a single sweep over the edge list per batch.
    """
    n = indptr.size - 1
    if n <= 1:
        return 0
    queue = np.empty(n, dtype=np.int64)
    if bfs_distances(indptr, indices, 0, np.full(n, -1, dtype=np.int64), queue) < n:
        return -1
    seen = np.empty(n, dtype=np.uint64)
    front = np.empty(n, dtype=np.uint64)
    nxt = np.empty(n, dtype=np.uint64)
    best = 0
    for base in range(0, n, 64):
        width = min(64, n - base)
        full = ~_ZERO if width == 64 else (_ONE << np.uint64(width)) - _ONE
        seen[:] = _ZERO
        front[:] = _ZERO
        for i in range(width):
            seen[base + i] = _ONE << np.uint64(i)
            front[base + i] = _ONE << np.uint64(i)
        level = 0
        while True:
            # a source is finished once every vertex carries its bit
            acc = full
            for v in range(n):
                acc &= seen[v]
            if acc == full:
                break
            any_new = False
            for v in range(n):
                bits = _ZERO
                for e in range(indptr[v], indptr[v + 1]):
                    bits |= front[indices[e]]
                bits &= ~seen[v]
                nxt[v] = bits
                if bits != _ZERO:
                    any_new = True
            if not any_new:
                break
            for v in range(n):
                seen[v] |= nxt[v]
                front[v] = nxt[v]
            level += 1
        if level > best:
            best = level
    return best
