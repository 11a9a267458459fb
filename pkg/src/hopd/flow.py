"""Uncapacitated min-cost transport by successive shortest paths with potentials."""

from __future__ import annotations

import math
from typing import Sequence


def min_cost_transport(divergence: Sequence, cost) -> float:
    """Minimize sum pi_ij * cost[i][j] subject to pi >= 0 and
    sum_j (pi_ij - pi_ji) = divergence[i] for every node i.

    Divergences may be ints, floats, or Fractions; costs are nonnegative
    floats over all ordered node pairs.  Shortest paths run on the residual
    network (forward arcs uncapacitated, backward arcs capped by current
    flow) with node potentials keeping reduced costs nonnegative.
    """
    n = len(divergence)
    if n == 0:
        return 0.0
    if sum(divergence) != 0:
        raise ValueError("divergences must sum to zero")
    for i in range(n):
        for j in range(n):
            if i != j:
                cij = cost[i][j]
                if math.isnan(cij) or cij < 0:
                    raise ValueError("costs must be nonnegative")
                if math.isinf(cij):
                    raise ValueError("infinite cost arc")

    excess = list(divergence)
    pot = [0.0] * n
    flow: dict[tuple[int, int], object] = {}
    value = 0.0

    while True:
        source = next((i for i in range(n) if excess[i] > 0), None)
        if source is None:
            break
        dist, parent, via_back = _dijkstra(n, cost, flow, pot, source)
        sink = None
        best = math.inf
        for i in range(n):
            if excess[i] < 0 and dist[i] < best:
                best = dist[i]
                sink = i
        if sink is None:
            raise RuntimeError("deficit unreachable")
        # bottleneck: backward arcs are capped by their current flow
        amount = min(excess[source], -excess[sink])
        node = sink
        while node != source:
            prev = parent[node]
            if via_back[node]:
                cap = flow[(node, prev)]
                if cap < amount:
                    amount = cap
            node = prev
        node = sink
        while node != source:
            prev = parent[node]
            if via_back[node]:
                left = flow[(node, prev)] - amount
                if left:
                    flow[(node, prev)] = left
                else:
                    del flow[(node, prev)]
                value -= float(amount) * cost[node][prev]
            else:
                flow[(prev, node)] = flow.get((prev, node), 0) + amount
                value += float(amount) * cost[prev][node]
            node = prev
        for i in range(n):
            if dist[i] < math.inf:
                pot[i] += dist[i]
        excess[source] -= amount
        excess[sink] += amount
    return value


def _dijkstra(n, cost, flow, pot, source):
    INF = math.inf
    dist = [INF] * n
    parent = [-1] * n
    via_back = [False] * n
    done = [False] * n
    dist[source] = 0.0
    for _ in range(n):
        u = -1
        best = INF
        for i in range(n):
            if not done[i] and dist[i] < best:
                best = dist[i]
                u = i
        if u < 0:
            break
        done[u] = True
        for v in range(n):
            if v == u or done[v]:
                continue
            rc = cost[u][v] + pot[u] - pot[v]
            back = False
            if flow.get((v, u), 0) > 0:
                rc_b = -cost[v][u] + pot[u] - pot[v]
                if rc_b < rc:
                    rc = rc_b
                    back = True
            if rc < 0:
                rc = 0.0  # tiny negatives from float roundoff only
            alt = dist[u] + rc
            if alt < dist[v]:
                dist[v] = alt
                parent[v] = u
                via_back[v] = back
    return dist, parent, via_back
