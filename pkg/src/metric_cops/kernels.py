"""Hot loops: single/multi-source Dijkstra, exact metric-graph diameter,
and retrograde labelling of the discrete pursuit game.

Every function here takes and returns plain numpy arrays so that it can be
compiled by numba or executed as ordinary Python (see ``_accel``).
"""
import heapq

import numpy as np

from ._accel import njit


@njit(cache=True)
def dijkstra(indptr, nbr, wgt, seeds, seed_dist, limit):
    """Multi-source Dijkstra over a CSR adjacency.

    ``seeds[i]`` starts at distance ``seed_dist[i]``.  Vertices farther than
    ``limit`` are left at ``inf``.
    """
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    done = np.zeros(n, dtype=np.bool_)
    heap = [(0.0, np.int64(0))]
    heap.pop()
    for i in range(seeds.shape[0]):
        s = seeds[i]
        d0 = seed_dist[i]
        if d0 <= limit and d0 < dist[s]:
            dist[s] = d0
            heapq.heappush(heap, (d0, np.int64(s)))
    while len(heap) > 0:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for p in range(indptr[u], indptr[u + 1]):
            v = nbr[p]
            nd = d + wgt[p]
            if nd < dist[v] and nd <= limit:
                dist[v] = nd
                heapq.heappush(heap, (nd, np.int64(v)))
    return dist


@njit(cache=True)
def all_pairs(indptr, nbr, wgt):
    n = indptr.shape[0] - 1
    out = np.empty((n, n))
    seeds = np.zeros(1, dtype=np.int64)
    zero = np.zeros(1)
    for s in range(n):
        seeds[0] = s
        out[s, :] = dijkstra(indptr, nbr, wgt, seeds, zero, np.inf)
    return out


@njit(cache=True)
def _best_over_edge(Du_c, Du_d, Dv_c, Dv_d, Lf):
    # max over y on edge (c, d) of d(u, y) + d(v, y); piecewise linear and
    # concave, so the max sits at an endpoint or a kink.
    best = -1.0
    bu = 0.5 * (Lf + Du_d - Du_c)
    bv = 0.5 * (Lf + Dv_d - Dv_c)
    cands = (0.0, Lf, min(max(bu, 0.0), Lf), min(max(bv, 0.0), Lf))
    for b in cands:
        a = min(b + Du_c, Lf - b + Du_d)
        c = min(b + Dv_c, Lf - b + Dv_d)
        if a + c > best:
            best = a + c
    return best


@njit(cache=True)
def diameter_from_apsp(D, eu, ev, elen):
    """Exact diameter of a metric graph given vertex all-pairs distances."""
    n = D.shape[0]
    best = 0.0
    for i in range(n):
        for j in range(n):
            if D[i, j] > best:
                best = D[i, j]
    m = eu.shape[0]
    for e in range(m):
        u = eu[e]
        v = ev[e]
        Le = elen[e]
        same = min(Le, 0.5 * (Le + D[u, v]))
        if same > best:
            best = same
        for f in range(e + 1, m):
            c = eu[f]
            d = ev[f]
            s = _best_over_edge(D[u, c], D[u, d], D[v, c], D[v, d], elen[f])
            val = 0.5 * (Le + s)
            if val > best:
                best = val
    return best


@njit(cache=True)
def retrograde(n, succ_ptr, succ_idx, rnb_ptr, rnb_idx, captured):
    """Least-fixpoint labelling of cop-winning states by reverse BFS.

    States are (cop multiset m, robber vertex r, turn).  Returns two int
    arrays of shape (M, n) with the retrograde depth (plies to capture under
    optimal play) of cop-to-move and robber-to-move states: 0 for captured
    states, -1 where the robber escapes forever.
    """
    M = succ_ptr.shape[0] - 1
    cop_lvl = np.full((M, n), -1, dtype=np.int64)
    rob_lvl = np.full((M, n), -1, dtype=np.int64)
    count = np.empty((M, n), dtype=np.int64)
    for m in range(M):
        for r in range(n):
            count[m, r] = rnb_ptr[r + 1] - rnb_ptr[r]
    # queue entries: state * 2 + turn, turn 0 = cops to move, 1 = robber
    queue = np.empty(2 * M * n, dtype=np.int64)
    head = 0
    tail = 0
    for m in range(M):
        for r in range(n):
            if captured[m, r]:
                cop_lvl[m, r] = 0
                rob_lvl[m, r] = 0
                queue[tail] = (m * n + r) * 2
                tail += 1
                queue[tail] = (m * n + r) * 2 + 1
                tail += 1
    while head < tail:
        code = queue[head]
        head += 1
        turn = code % 2
        s = code // 2
        m = s // n
        r = s % n
        if turn == 0:
            lvl = cop_lvl[m, r]
            # robber-to-move predecessors (m, r0) with r in N[r0]
            for p in range(rnb_ptr[r], rnb_ptr[r + 1]):
                r0 = rnb_idx[p]
                if rob_lvl[m, r0] >= 0:
                    continue
                count[m, r0] -= 1
                if count[m, r0] == 0:
                    rob_lvl[m, r0] = lvl + 1
                    queue[tail] = (m * n + r0) * 2 + 1
                    tail += 1
        else:
            lvl = rob_lvl[m, r]
            # cop-to-move predecessors (m0, r) with m in succ(m0); closed
            # neighbourhoods are symmetric so succ doubles as pred
            for p in range(succ_ptr[m], succ_ptr[m + 1]):
                m0 = succ_idx[p]
                if cop_lvl[m0, r] >= 0:
                    continue
                cop_lvl[m0, r] = lvl + 1
                queue[tail] = (m0 * n + r) * 2
                tail += 1
    return cop_lvl, rob_lvl
