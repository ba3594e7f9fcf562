"""Numeric inner loops.

Every kernel has a numba-compiled form and a numpy/Python form; which one is
bound at import time depends on :data:`trampsim._accel.HAS_NUMBA`. Both forms
produce bit-identical results on integer-valued float64 weights, since sums of
integers below 2**53 are exact and ``min`` is order independent.
"""
import heapq

import numpy as np

from ._accel import HAS_NUMBA, njit

INF = np.inf

# rows per block in the broadcasting min-plus fallback
_MINPLUS_BLOCK_CELLS = 1 << 22


def _floyd_warshall_loops(dist):
    n = dist.shape[0]
    for k in range(n):
        for i in range(n):
            dik = dist[i, k]
            if dik == INF:
                continue
            for j in range(n):
                cand = dik + dist[k, j]
                if cand < dist[i, j]:
                    dist[i, j] = cand
    return dist


def _floyd_warshall_numpy(dist):
    for k in range(dist.shape[0]):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)
    return dist


def _min_plus_loops(a, b):
    n, m = a.shape
    p = b.shape[1]
    out = np.full((n, p), INF)
    for i in range(n):
        for k in range(m):
            aik = a[i, k]
            if aik == INF:
                continue
            for j in range(p):
                cand = aik + b[k, j]
                if cand < out[i, j]:
                    out[i, j] = cand
    return out


def _min_plus_numpy(a, b):
    n, m = a.shape
    p = b.shape[1]
    out = np.empty((n, p))
    step = max(1, _MINPLUS_BLOCK_CELLS // max(1, m * p))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        out[lo:hi] = (a[lo:hi, :, None] + b[None, :, :]).min(axis=1)
    return out


def _dijkstra_loops(indptr, nbr, chan, weights, source, node_ok, chan_ok):
    n = indptr.shape[0] - 1
    dist = np.full(n, INF)
    pred = np.full(n, -1, dtype=np.int64)
    done = np.zeros(n, dtype=np.bool_)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while len(heap) > 0:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for pos in range(indptr[u], indptr[u + 1]):
            c = chan[pos]
            v = nbr[pos]
            if not chan_ok[c] or not node_ok[v] or done[v]:
                continue
            nd = d + weights[c]
            if nd < dist[v] or (nd == dist[v] and c < pred[v]):
                dist[v] = nd
                pred[v] = c
                heapq.heappush(heap, (nd, v))
    return dist, pred


if HAS_NUMBA:
    floyd_warshall_inplace = njit(_floyd_warshall_loops)
    min_plus = njit(_min_plus_loops)
    _dijkstra_impl = njit(_dijkstra_loops)
else:
    floyd_warshall_inplace = _floyd_warshall_numpy
    min_plus = _min_plus_numpy
    _dijkstra_impl = _dijkstra_loops


def dijkstra(indptr, nbr, chan, weights, source, node_ok, chan_ok):
    """Single-source distances over a CSR adjacency.

    ``nbr[pos]`` / ``chan[pos]`` give the far endpoint and channel index of the
    ``pos``-th adjacency slot; pass the reversed CSR to get distances *to*
    ``source``. Nodes with ``node_ok[v] == False`` and channels with
    ``chan_ok[c] == False`` are skipped. Returns ``(dist, pred_channel)``;
    among equal-distance parents the smallest channel index wins.
    """
    return _dijkstra_impl(indptr, nbr, chan, weights, np.int64(source), node_ok, chan_ok)


KERNELS_NUMPY = {
    "floyd_warshall": _floyd_warshall_numpy,
    "min_plus": _min_plus_numpy,
    "dijkstra": _dijkstra_loops,
}
KERNELS_ACTIVE = {
    "floyd_warshall": floyd_warshall_inplace,
    "min_plus": min_plus,
    "dijkstra": _dijkstra_impl,
}
