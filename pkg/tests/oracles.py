"""Independent brute-force references used by the tests."""
import itertools
import math

import numpy as np

from trampsim.graph import Channel, build_network


def simple_paths(network, s, t, amount):
    """Every loopless channel sequence s -> t as sorted ``(weight, channels)``."""
    w = network.weights(amount)
    out = []

    def walk(u, chans, seen, weight):
        if u == t:
            out.append((weight, tuple(chans)))
            return
        for c in range(network.m):
            if network.src[c] != u:
                continue
            x = int(network.dst[c])
            if x in seen:
                continue
            chans.append(c)
            seen.add(x)
            walk(x, chans, seen, weight + int(w[c]))
            chans.pop()
            seen.discard(x)

    if s == t:
        return [(0, ())]
    walk(s, [], {s}, 0)
    return sorted(out)


def bellman_ford_row(network, s, amount):
    dist = [math.inf] * network.n
    dist[s] = 0
    w = network.weights(amount)
    for _ in range(network.n):
        changed = False
        for c in range(network.m):
            u, v = int(network.src[c]), int(network.dst[c])
            if dist[u] + int(w[c]) < dist[v]:
                dist[v] = dist[u] + int(w[c])
                changed = True
        if not changed:
            break
    return np.array(dist, dtype=float)


def random_network(n, m, seed, max_fee=5, zero_ok=True, parallel=True):
    rng = np.random.default_rng(seed)
    chans = []
    pairs = set()
    while len(chans) < m:
        u, v = (int(x) for x in rng.integers(n, size=2))
        if u == v:
            continue
        if not parallel and (u, v) in pairs:
            continue
        pairs.add((u, v))
        lo = 0 if zero_ok else 1
        chans.append(Channel(len(chans), u, v, int(rng.integers(lo, max_fee + 1)), int(rng.integers(0, 3)), 10**9))
    return build_network(range(n), chans)


def count_clique_routes(M):
    """Closed form for simple routes between two fixed nodes of an M-clique."""
    return sum(math.comb(M - 2, k) * math.factorial(k) for k in range(M - 1))


def enumerate_clique_routes(M):
    inner = range(2, M)
    total = 0
    for k in range(M - 1):
        total += sum(1 for _ in itertools.permutations(inner, k))
    return total
