"""Successive-shortest-path kernel for dense bipartite transport.

Plain-loop implementation so numba can JIT it; falls back to the same
function uncompiled when numba is unavailable. Node ids: sources are
``0..ns-1``, sinks are ``ns..ns+nt-1``. Ties in the Dijkstra extraction
break toward the lowest node id, which makes the solver deterministic.
"""

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def ssp_transport(costs, supplies, demands, admissible):
    """Min-cost integral flow saturating all supplies and demands.

    Args:
        costs: (ns, nt) float64 arc costs, nonnegative on admissible arcs.
        supplies: (ns,) int64 positive supplies.
        demands: (nt,) int64 positive demands, summing to sum(supplies).
        admissible: (ns, nt) boolean arc mask.

    Returns:
        (flow, pot, feasible): integral flow matrix, node potentials of
        length ns+nt certifying optimality, and a feasibility flag.
    """
    ns, nt = costs.shape
    nn = ns + nt
    flow = np.zeros((ns, nt), dtype=np.int64)
    pot = np.zeros(nn, dtype=np.float64)
    ex_s = supplies.copy()
    ex_t = demands.copy()

    # Dual-feasible warm start: price each sink at its cheapest admissible
    # arc, then greedily saturate zero-reduced-cost arcs. This preserves
    # the invariant (reduced costs >= 0 on residual arcs) and typically
    # leaves only a small excess for the shortest-path phase.
    for t in range(nt):
        best = np.inf
        for s in range(ns):
            if admissible[s, t] and costs[s, t] < best:
                best = costs[s, t]
        if best < np.inf:
            pot[ns + t] = best
    for t in range(nt):
        if ex_t[t] == 0:
            continue
        for s in range(ns):
            if ex_s[s] > 0 and admissible[s, t] and costs[s, t] - pot[ns + t] == 0.0:
                push = min(ex_s[s], ex_t[t])
                flow[s, t] += push
                ex_s[s] -= push
                ex_t[t] -= push
                if ex_t[t] == 0:
                    break

    remaining = np.int64(0)
    for s in range(ns):
        remaining += ex_s[s]

    dist = np.empty(nn, dtype=np.float64)
    done = np.empty(nn, dtype=np.bool_)
    parent = np.empty(nn, dtype=np.int64)
    INF = np.inf

    while remaining > 0:
        for v in range(nn):
            dist[v] = INF
            done[v] = False
            parent[v] = -1
        for s in range(ns):
            if ex_s[s] > 0:
                dist[s] = 0.0
        target = -1
        while True:
            u = -1
            best = INF
            for v in range(nn):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u == -1:
                break
            done[u] = True
            if u >= ns and ex_t[u - ns] > 0:
                target = u
                break
            if u < ns:
                base = dist[u] + pot[u]
                for t in range(nt):
                    if admissible[u, t] and not done[ns + t]:
                        nd = base + costs[u, t] - pot[ns + t]
                        if nd < dist[ns + t]:
                            dist[ns + t] = nd
                            parent[ns + t] = u
            else:
                t = u - ns
                base = dist[u] + pot[u]
                for s in range(ns):
                    if flow[s, t] > 0 and not done[s]:
                        nd = base - costs[s, t] - pot[s]
                        if nd < dist[s]:
                            dist[s] = nd
                            parent[s] = ns + t
        if target == -1:
            return flow, pot, False

        dt = dist[target]
        for v in range(nn):
            dv = dist[v]
            if dv < dt:
                pot[v] += dv
            else:
                pot[v] += dt

        # Trace the augmenting path back to a supply source, collecting
        # the bottleneck over demand, supply, and backward-arc flows.
        bottleneck = ex_t[target - ns]
        v = target
        while True:
            u = parent[v]  # u is a source, arc u->v is forward
            prev = parent[u]
            if prev == -1:
                if ex_s[u] < bottleneck:
                    bottleneck = ex_s[u]
                break
            t_prev = prev - ns  # backward arc u<-t_prev carries flow[u, t_prev]
            if flow[u, t_prev] < bottleneck:
                bottleneck = flow[u, t_prev]
            v = prev

        v = target
        while True:
            u = parent[v]
            flow[u, v - ns] += bottleneck
            prev = parent[u]
            if prev == -1:
                ex_s[u] -= bottleneck
                break
            flow[u, prev - ns] -= bottleneck
            v = prev
        ex_t[target - ns] -= bottleneck
        remaining -= bottleneck

    return flow, pot, True
