"""Numba-compiled inner loops for the topology metrics.

Everything here is deliberately sequential: the grid runner parallelizes
across runs instead, and sequential kernels keep floating-point results
bit-identical regardless of thread count.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def brandes_betweenness(indptr, indices, n):
    """Raw betweenness over unordered pairs of an unweighted undirected graph.

    Unreachable pairs contribute nothing, so disconnected graphs are fine.
    """
    bc = np.zeros(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int32)
    sigma = np.empty(n, dtype=np.float64)
    delta = np.empty(n, dtype=np.float64)
    order = np.empty(n, dtype=np.int32)

    for s in range(n):
        for i in range(n):
            dist[i] = -1
            sigma[i] = 0.0
            delta[i] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv1 = dist[v] + 1
            sv = sigma[v]
            for ei in range(indptr[v], indptr[v + 1]):
                w = indices[ei]
                if dist[w] < 0:
                    dist[w] = dv1
                    order[tail] = w
                    tail += 1
                    sigma[w] += sv
                elif dist[w] == dv1:
                    sigma[w] += sv
        for idx in range(tail - 1, 0, -1):
            w = order[idx]
            coeff = (1.0 + delta[w]) / sigma[w]
            dw1 = dist[w] - 1
            for ei in range(indptr[w], indptr[w + 1]):
                v = indices[ei]
                if dist[v] == dw1:
                    delta[v] += sigma[v] * coeff
            bc[w] += delta[w]
    return bc * 0.5


@njit(cache=True, nogil=True)
def common_neighbor_sum(indptr, indices, edge_u, edge_v):
    """Sum over edges of |N(u) & N(v)|; equals three times the triangle count.

    Adjacency lists must be sorted (csr_adjacency guarantees it).
    """
    total = np.int64(0)
    for e in range(len(edge_u)):
        u = edge_u[e]
        v = edge_v[e]
        i = indptr[u]
        j = indptr[v]
        iu_end = indptr[u + 1]
        iv_end = indptr[v + 1]
        while i < iu_end and j < iv_end:
            a = indices[i]
            b = indices[j]
            if a == b:
                total += 1
                i += 1
                j += 1
            elif a < b:
                i += 1
            else:
                j += 1
    return total


@njit(cache=True, nogil=True)
def louvain_sweeps(indptr, indices, weights, order, comm, sigma_tot,
                   node_strength, total_weight, max_sweeps):
    """Local-moving phase: shift nodes to the neighbor community with the
    largest modularity gain until a full sweep moves nothing.

    comm and sigma_tot are updated in place; returns the number of moves.
    Ties and sub-1e-12 gains keep the current community, which (with the
    sweep cap) rules out oscillation.
    """
    n = len(comm)
    neigh_weight = np.zeros(n, dtype=np.float64)
    neigh_comms = np.empty(n, dtype=np.int64)
    moves_total = 0
    two_m = 2.0 * total_weight

    for _ in range(max_sweeps):
        moves = 0
        for oi in range(n):
            u = order[oi]
            cu = comm[u]
            k_u = node_strength[u]

            n_neigh = 0
            for ei in range(indptr[u], indptr[u + 1]):
                v = indices[ei]
                if v == u:
                    continue
                cv = comm[v]
                if neigh_weight[cv] == 0.0:
                    neigh_comms[n_neigh] = cv
                    n_neigh += 1
                neigh_weight[cv] += weights[ei]

            # detach u; gains are then insertion gains relative to staying
            sigma_tot[cu] -= k_u
            best_comm = cu
            best_gain = neigh_weight[cu] - sigma_tot[cu] * k_u / two_m
            for ni in range(n_neigh):
                c = neigh_comms[ni]
                if c == cu:
                    continue
                gain = neigh_weight[c] - sigma_tot[c] * k_u / two_m
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_comm = c
                elif best_comm != cu and abs(gain - best_gain) <= 1e-12 and c < best_comm:
                    best_comm = c
            sigma_tot[best_comm] += k_u
            if best_comm != cu:
                comm[u] = best_comm
                moves += 1

            for ni in range(n_neigh):
                neigh_weight[neigh_comms[ni]] = 0.0

        moves_total += moves
        if moves == 0:
            break
    return moves_total
