"""Shortest paths, hop-limited distances and k loopless shortest routes.

Ties between equal-weight routes are always broken by the lexicographic order
of their channel-index sequences, so every function here is deterministic.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import Network, Route, make_route

INF = np.inf


def _csr_arrays(network: Network):
    arrs = network._cache.get("csr")
    if arrs is None:
        fwd = (network.out_indptr, network.dst[network.out_chan], network.out_chan)
        rev = (network.in_indptr, network.src[network.in_chan], network.in_chan)
        arrs = (fwd, rev)
        network._cache["csr"] = arrs
    return arrs


def _float_weights(network: Network, amount: int) -> np.ndarray:
    key = ("fweights", amount)
    w = network._cache.get(key)
    if w is None:
        w = network.weights(amount).astype(np.float64)
        network._cache[key] = w
    return w


def _tight_reachable(network, w, dist_to_t, start, t, blocked, node_ok, chan_ok):
    """BFS over channels on some shortest route to ``t``, avoiding ``blocked`` nodes."""
    seen = {start}
    frontier = deque([start])
    while frontier:
        u = frontier.popleft()
        if u == t:
            return True
        for c in network.out_channels(u):
            x = int(network.dst[c])
            if x in seen or x in blocked or not node_ok[x] or not chan_ok[c]:
                continue
            if w[c] + dist_to_t[x] == dist_to_t[u]:
                seen.add(x)
                frontier.append(x)
    return False


def _lexmin_walk(network, w, dist_to_t, s, t, node_ok, chan_ok):
    """Lexicographically smallest min-weight simple channel sequence s -> t.

    ``dist_to_t`` must be the distances to ``t`` in the graph restricted by
    ``node_ok``/``chan_ok``. A positive-weight tight channel always extends to
    a completion; a zero-weight one may run into visited nodes, so it is
    checked by a tight-subgraph BFS first.
    """
    if dist_to_t[s] == INF:
        return None
    path = []
    visited = {s}
    u = s
    while u != t:
        for c in network.out_channels(u):
            x = int(network.dst[c])
            if not chan_ok[c] or not node_ok[x] or x in visited:
                continue
            if w[c] + dist_to_t[x] != dist_to_t[u]:
                continue
            if w[c] == 0 and not _tight_reachable(network, w, dist_to_t, x, t, visited, node_ok, chan_ok):
                continue
            path.append(int(c))
            visited.add(x)
            u = x
            break
        else:  # pragma: no cover - guarded by the feasibility invariant
            raise AssertionError("lexmin walk stalled")
    return path


def restricted_shortest_route(network, s, t, amount, node_ok=None, chan_ok=None):
    """Min-weight route s -> t (lexicographic tie-break) avoiding masked nodes/channels.

    Returns ``None`` when ``t`` is unreachable.
    """
    if node_ok is None:
        node_ok = np.ones(network.n, dtype=np.bool_)
    if chan_ok is None:
        chan_ok = np.ones(network.m, dtype=np.bool_)
    if not node_ok[s] or not node_ok[t]:
        return None
    if s == t:
        return Route((), s, t, 0)
    _, rev = _csr_arrays(network)
    w = _float_weights(network, amount)
    dist_to_t, _ = kernels.dijkstra(*rev, w, t, node_ok, chan_ok)
    chans = _lexmin_walk(network, w, dist_to_t, s, t, node_ok, chan_ok)
    if chans is None:
        return None
    return make_route(network, chans, s, t, amount)


@dataclass(frozen=True)
class DistanceMatrix:
    """All-pairs minimum route weights (``inf`` when unreachable).

    Routes are rebuilt on demand by walking channels that stay on a
    shortest route, picking the smallest channel index first.
    """

    network: Network
    amount: int
    dist: np.ndarray

    def route(self, s: int, t: int):
        if self.dist[s, t] == INF:
            return None
        if s == t:
            return Route((), s, t, 0)
        w = _float_weights(self.network, self.amount)
        node_ok = np.ones(self.network.n, dtype=np.bool_)
        chan_ok = np.ones(self.network.m, dtype=np.bool_)
        chans = _lexmin_walk(self.network, w, self.dist[:, t], s, t, node_ok, chan_ok)
        return make_route(self.network, chans, s, t, self.amount)


def all_pairs_shortest(network: Network, amount: int) -> DistanceMatrix:
    """Floyd-Warshall over the cheapest-parallel-channel adjacency matrix."""
    key = ("apsp", amount)
    dm = network._cache.get(key)
    if dm is None:
        dist = np.array(network.adjacency_weights(amount), dtype=np.float64, copy=True)
        dist = kernels.floyd_warshall_inplace(dist)
        dist.setflags(write=False)
        dm = DistanceMatrix(network, amount, dist)
        network._cache[key] = dm
    return dm


@dataclass(frozen=True)
class SingleSource:
    network: Network
    amount: int
    source: int
    dist: np.ndarray
    pred: np.ndarray

    def route(self, t: int):
        if self.dist[t] == INF:
            return None
        chans = []
        v = t
        while v != self.source:
            c = int(self.pred[v])
            chans.append(c)
            v = int(self.network.src[c])
        return make_route(self.network, chans[::-1], self.source, t, self.amount)


def shortest_path_single_source(network: Network, s: int, amount: int) -> SingleSource:
    """Dijkstra from ``s``; an independent cross-check of :func:`all_pairs_shortest`."""
    fwd, _ = _csr_arrays(network)
    node_ok = np.ones(network.n, dtype=np.bool_)
    chan_ok = np.ones(network.m, dtype=np.bool_)
    dist, pred = kernels.dijkstra(*fwd, _float_weights(network, amount), s, node_ok, chan_ok)
    return SingleSource(network, amount, s, dist, pred)


@dataclass(frozen=True)
class HopLimitedDistances:
    """``dist[h - 1]`` holds minimum weights over routes of at most ``h`` channels."""

    dist: np.ndarray

    @property
    def h_max(self) -> int:
        return self.dist.shape[0]

    def at(self, h: int) -> np.ndarray:
        if not 1 <= h <= self.h_max:
            raise IndexError(f"hop bound {h} outside 1..{self.h_max}")
        return self.dist[h - 1]


def hop_limited_distances(network: Network, h_max: int, amount: int) -> HopLimitedDistances:
    """Repeated min-plus products of the one-hop matrix.

    Once a power stops changing, all later ones are equal, so the remaining
    slices are filled by copy.
    """
    if h_max < 1:
        raise ValueError("h_max must be >= 1")
    one = np.array(network.adjacency_weights(amount), copy=True)
    out = np.empty((h_max,) + one.shape)
    out[0] = one
    for h in range(1, h_max):
        nxt = kernels.min_plus(out[h - 1], one)
        np.fill_diagonal(nxt, 0.0)
        out[h] = nxt
        if np.array_equal(nxt, out[h - 1]):
            out[h + 1:] = nxt
            break
    out.setflags(write=False)
    return HopLimitedDistances(out)


def _yen(network, s, t, k, amount):
    n, m = network.n, network.m
    first = restricted_shortest_route(network, s, t, amount)
    if first is None:
        return []
    found = [first]
    seen = {first.channels}
    candidates = []
    all_nodes = np.ones(n, dtype=np.bool_)
    all_chans = np.ones(m, dtype=np.bool_)
    while len(found) < k:
        prev = found[-1]
        prev_nodes = prev.nodes(network)
        for i in range(len(prev.channels)):
            root = prev.channels[:i]
            spur = prev_nodes[i]
            chan_ok = all_chans.copy()
            for p in found:
                if len(p.channels) > i and p.channels[:i] == root:
                    chan_ok[p.channels[i]] = False
            node_ok = all_nodes.copy()
            node_ok[prev_nodes[:i]] = False
            tail = restricted_shortest_route(network, spur, t, amount, node_ok, chan_ok)
            if tail is None:
                continue
            chans = root + tail.channels
            if chans in seen:
                continue
            seen.add(chans)
            weight = sum(int(network.weights(amount)[c]) for c in root) + tail.weight
            heapq.heappush(candidates, (weight, chans))
        if not candidates:
            break
        weight, chans = heapq.heappop(candidates)
        found.append(Route(chans, s, t, weight))
    return found


def k_shortest_paths(network: Network, s: int, t: int, k: int, amount: int) -> list:
    """Up to ``k`` loopless routes s -> t, ordered by (weight, channel sequence)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if s == t:
        return [Route((), s, t, 0)]
    key = ("ksp", amount, s, t)
    hit = network._cache.get(key)
    if hit is not None:
        k_done, routes = hit
        if k <= k_done or len(routes) < k_done:
            return routes[:k]
    routes = _yen(network, s, t, k, amount)
    network._cache[key] = (k, routes)
    return routes
