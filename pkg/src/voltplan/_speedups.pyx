# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled flow kernels.

Faithful translation of _speedups_py: same algorithms, same adjacency
construction order, and a heap that replicates heapq's sift logic on
(dist, node) pairs, so both kernels produce bit-identical results.
"""

from libc.stdlib cimport free, malloc

INF = 1 << 62

cdef long long C_INF = <long long>1 << 62


cdef inline bint _lt(long long d1, long long v1, long long d2, long long v2) noexcept:
    return d1 < d2 or (d1 == d2 and v1 < v2)


cdef void _heap_push(long long* hd, long long* hv, Py_ssize_t* size,
                     long long d, long long v) noexcept:
    # heapq._siftdown(heap, 0, len(heap)-1) after append
    cdef Py_ssize_t pos = size[0]
    cdef Py_ssize_t parent
    size[0] += 1
    while pos > 0:
        parent = (pos - 1) >> 1
        if _lt(d, v, hd[parent], hv[parent]):
            hd[pos] = hd[parent]
            hv[pos] = hv[parent]
            pos = parent
        else:
            break
    hd[pos] = d
    hv[pos] = v


cdef void _heap_pop(long long* hd, long long* hv, Py_ssize_t* size,
                    long long* out_d, long long* out_v) noexcept:
    # heapq.heappop: root out, last element sifted up from the root
    cdef long long last_d, last_v, nd, nv
    cdef Py_ssize_t pos, child, right, end, start
    out_d[0] = hd[0]
    out_v[0] = hv[0]
    size[0] -= 1
    end = size[0]
    if end == 0:
        return
    last_d = hd[end]
    last_v = hv[end]
    # heapq._siftup(heap, 0): walk the smaller child down to a leaf
    pos = 0
    start = 0
    child = 1
    while child < end:
        right = child + 1
        if right < end and not _lt(hd[child], hv[child], hd[right], hv[right]):
            child = right
        hd[pos] = hd[child]
        hv[pos] = hv[child]
        pos = child
        child = 2 * pos + 1
    # then _siftdown(heap, 0, pos) with the saved last element
    nd = last_d
    nv = last_v
    while pos > start:
        child = (pos - 1) >> 1
        if _lt(nd, nv, hd[child], hv[child]):
            hd[pos] = hd[child]
            hv[pos] = hv[child]
            pos = child
        else:
            break
    hd[pos] = nd
    hv[pos] = nv


cdef struct Arena:
    long long* to
    long long* cap
    long long* cst
    Py_ssize_t* nxt
    Py_ssize_t* first


cdef int _build(Arena* g, Py_ssize_t n, Py_ssize_t m,
                tails, heads, caps, costs) except -1:
    cdef Py_ssize_t i, e, t, h
    g.to = <long long*>malloc(2 * m * sizeof(long long))
    g.cap = <long long*>malloc(2 * m * sizeof(long long))
    g.cst = <long long*>malloc(2 * m * sizeof(long long))
    g.nxt = <Py_ssize_t*>malloc(2 * m * sizeof(Py_ssize_t))
    g.first = <Py_ssize_t*>malloc(n * sizeof(Py_ssize_t))
    if not (g.to and g.cap and g.cst and g.nxt and g.first):
        raise MemoryError()
    for i in range(n):
        g.first[i] = -1
    for i in range(m):
        t = tails[i]
        h = heads[i]
        e = 2 * i
        g.to[e] = h
        g.cap[e] = caps[i]
        g.cst[e] = costs[i]
        g.nxt[e] = g.first[t]
        g.first[t] = e
        g.to[e + 1] = t
        g.cap[e + 1] = 0
        g.cst[e + 1] = -(<long long>costs[i])
        g.nxt[e + 1] = g.first[h]
        g.first[h] = e + 1
    return 0


cdef void _free(Arena* g) noexcept:
    free(g.to)
    free(g.cap)
    free(g.cst)
    free(g.nxt)
    free(g.first)


cdef bint _bellman_ford(Arena* g, Py_ssize_t n, Py_ssize_t src,
                        long long* dist) noexcept:
    cdef Py_ssize_t u, e, rounds
    cdef long long du
    cdef bint changed = True
    for u in range(n):
        dist[u] = C_INF
    dist[src] = 0
    rounds = 0
    while changed and rounds <= n:
        changed = False
        rounds += 1
        for u in range(n):
            du = dist[u]
            if du >= C_INF:
                continue
            e = g.first[u]
            while e != -1:
                if g.cap[e] > 0 and du + g.cst[e] < dist[g.to[e]]:
                    dist[g.to[e]] = du + g.cst[e]
                    changed = True
                e = g.nxt[e]
    return changed


def shortest_paths(n, tails, heads, caps, costs, flows, lowers, src):
    """Residual Bellman-Ford; see the pure twin for the contract."""
    cdef Py_ssize_t m = len(tails)
    rt, rh, rc, rcost = [], [], [], []
    cdef Py_ssize_t i
    for i in range(m):
        fwd = caps[i] - flows[i]
        bwd = flows[i] - lowers[i]
        if fwd > 0:
            rt.append(tails[i])
            rh.append(heads[i])
            rc.append(fwd)
            rcost.append(costs[i])
        if bwd > 0:
            rt.append(heads[i])
            rh.append(tails[i])
            rc.append(bwd)
            rcost.append(-costs[i])
    cdef Arena g
    cdef Py_ssize_t nn = n
    _build(&g, nn, len(rt), rt, rh, rc, rcost)
    cdef long long* dist = <long long*>malloc(nn * sizeof(long long))
    if not dist:
        _free(&g)
        raise MemoryError()
    cdef bint neg = _bellman_ford(&g, nn, src, dist)
    out = [dist[i] for i in range(nn)]
    free(dist)
    _free(&g)
    return out, bool(neg)


def mcmf(n, tails, heads, caps, costs, s, t, limit):
    """Successive shortest augmenting paths; see the pure twin."""
    cdef Py_ssize_t m = len(tails)
    cdef Py_ssize_t nn = n
    cdef Py_ssize_t src = s
    cdef Py_ssize_t dst = t
    cdef long long remaining = limit
    cdef Arena g
    _build(&g, nn, m, tails, heads, caps, costs)

    cdef long long* pot = <long long*>malloc(nn * sizeof(long long))
    cdef long long* dist = <long long*>malloc(nn * sizeof(long long))
    cdef Py_ssize_t* prev = <Py_ssize_t*>malloc(nn * sizeof(Py_ssize_t))
    cdef char* done = <char*>malloc(nn)
    # heap capacity: one push per successful relaxation plus the seed
    cdef Py_ssize_t heap_cap = 2 * (2 * m) + 4
    cdef long long* hd = <long long*>malloc(heap_cap * sizeof(long long))
    cdef long long* hv = <long long*>malloc(heap_cap * sizeof(long long))
    if not (pot and dist and prev and done and hd and hv):
        raise MemoryError()

    cdef Py_ssize_t i, u, v, e
    cdef long long value = 0
    cdef long long d, nd, popv, pu, bottleneck
    cdef Py_ssize_t heap_size
    cdef bint neg
    cdef bint has_negative = False
    for i in range(m):
        if costs[i] < 0:
            has_negative = True
            break
    if has_negative:
        neg = _bellman_ford(&g, nn, src, pot)
        if neg:
            _free(&g)
            free(pot); free(dist); free(prev); free(done); free(hd); free(hv)
            raise ValueError("negative-cost cycle reachable from source")
    else:
        for i in range(nn):
            pot[i] = 0

    while remaining > 0:
        for i in range(nn):
            dist[i] = C_INF
            done[i] = 0
        dist[src] = 0
        heap_size = 0
        _heap_push(hd, hv, &heap_size, 0, src)
        while heap_size > 0:
            _heap_pop(hd, hv, &heap_size, &d, &popv)
            u = <Py_ssize_t>popv
            if done[u]:
                continue
            done[u] = 1
            pu = pot[u]
            e = g.first[u]
            while e != -1:
                v = g.to[e]
                if g.cap[e] > 0 and not done[v] and pot[v] < C_INF:
                    nd = d + g.cst[e] + pu - pot[v]
                    if nd < dist[v]:
                        dist[v] = nd
                        prev[v] = e
                        _heap_push(hd, hv, &heap_size, nd, v)
                e = g.nxt[e]
        if dist[dst] >= C_INF:
            break
        for v in range(nn):
            if dist[v] < C_INF:
                pot[v] += dist[v]
        bottleneck = remaining
        v = dst
        while v != src:
            e = prev[v]
            if g.cap[e] < bottleneck:
                bottleneck = g.cap[e]
            v = g.to[e ^ 1]
        v = dst
        while v != src:
            e = prev[v]
            g.cap[e] -= bottleneck
            g.cap[e ^ 1] += bottleneck
            v = g.to[e ^ 1]
        value += bottleneck
        remaining -= bottleneck

    flows = [g.cap[2 * i + 1] for i in range(m)]
    pots = [pot[i] for i in range(nn)]
    _free(&g)
    free(pot); free(dist); free(prev); free(done); free(hd); free(hv)
    return value, flows, pots
