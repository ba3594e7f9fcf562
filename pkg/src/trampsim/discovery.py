"""Route discovery by a wallet querying selfish, partial and altruistic servers."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .availability import Episode
from .graph import Network, Route, neighborhood
from .pathing import all_pairs_shortest, k_shortest_paths, restricted_shortest_route, shortest_path_single_source
from .rng import hash64, stream

APSP_NODE_LIMIT = 1500


class ServerKind(str, Enum):
    TRAMPOLINE = "trampoline"
    PARTIAL = "partial"
    ALTRUISTIC = "altruistic"


@dataclass(frozen=True)
class ServerRole:
    node: int
    kind: ServerKind = ServerKind.TRAMPOLINE
    cache: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass(frozen=True)
class WalletPolicy:
    neighborhood_h: int = 2
    max_queries: int = 1
    routes_per_server: int = 5
    order_seed: int = 0
    undirected: bool = False

    def __post_init__(self):
        if self.max_queries < 1 or self.routes_per_server < 1:
            raise ValueError("max_queries and routes_per_server must be >= 1")
        if self.neighborhood_h < 0:
            raise ValueError("neighborhood_h must be >= 0")


@dataclass(frozen=True)
class DiscoveryOutcome:
    route: Optional[Route]
    queries_issued: int
    candidates_tried: int
    aware_nodes: frozenset
    success: bool
    no_server: bool = False
    attempts: tuple = ()
    queried: tuple = ()


class Mode(str, Enum):
    EFFICIENCY = "efficiency"
    EFFECTIVENESS = "effectiveness"


def _route_key(r: Route):
    return (r.weight, r.channels)


def optimal_route(network: Network, s: int, t: int, amount: int) -> Optional[Route]:
    """Global minimum-weight route (all-pairs table on small graphs, Dijkstra otherwise)."""
    if network.n <= APSP_NODE_LIMIT:
        return all_pairs_shortest(network, amount).route(s, t)
    key = ("opt", amount, s, t)
    if key not in network._cache:
        network._cache[key] = restricted_shortest_route(network, s, t, amount)
    return network._cache[key]


def _distances_from(network, s, amount):
    if network.n <= APSP_NODE_LIMIT:
        return all_pairs_shortest(network, amount).dist[s]
    return shortest_path_single_source(network, s, amount).dist


def assign_servers(
    network: Network,
    *,
    fraction: float = None,
    top_k: int = None,
    nodes: Iterable[int] = None,
    seed: int = 0,
    kind: ServerKind = ServerKind.TRAMPOLINE,
    exclude: Iterable[int] = (),
) -> tuple:
    """Pick server nodes by uniform fraction, top-k total degree, or an explicit set."""
    if sum(x is not None for x in (fraction, top_k, nodes)) != 1:
        raise ValueError("give exactly one of fraction, top_k, nodes")
    excluded = set(exclude)
    pool = np.array([v for v in range(network.n) if v not in excluded], dtype=np.int64)
    if nodes is not None:
        chosen = sorted(set(int(v) for v in nodes))
        if any(not 0 <= v < network.n for v in chosen):
            raise ValueError("server node out of range")
    elif fraction is not None:
        if not 0.0 <= fraction <= 1.0:
            raise ValueError("fraction must lie in [0, 1]")
        count = int(round(fraction * len(pool)))
        rng = stream(seed, "servers")
        chosen = sorted(int(v) for v in rng.choice(pool, size=count, replace=False))
    else:
        if not 0 <= top_k <= len(pool):
            raise ValueError("top_k exceeds node count")
        deg = np.diff(network.out_indptr) + np.diff(network.in_indptr)
        ranked = sorted(pool.tolist(), key=lambda v: (-int(deg[v]), v))
        chosen = sorted(ranked[:top_k])
    return tuple(ServerRole(v, kind) for v in chosen)


def assign_partial_nodes(
    network: Network,
    *,
    fraction: float = None,
    nodes: Iterable[int] = None,
    cache_size: int = 50,
    seed: int = 0,
    amount: int = 10**6,
    exclude: Iterable[int] = (),
) -> tuple:
    """Partial nodes, each caching shortest routes to ``cache_size`` uniform reachable targets."""
    base = assign_servers(network, fraction=fraction, nodes=nodes, seed=seed, exclude=exclude)
    roles = []
    for role in base:
        pn = role.node
        reachable = [v for v in np.flatnonzero(np.isfinite(_distances_from(network, pn, amount))).tolist() if v != pn]
        rng = stream(seed, "pn-cache", pn)
        size = min(cache_size, len(reachable))
        targets = sorted(int(v) for v in rng.choice(np.array(reachable, dtype=np.int64), size=size, replace=False)) if size else []
        cache = {t: optimal_route(network, pn, t, amount) for t in targets}
        roles.append(ServerRole(pn, ServerKind.PARTIAL, cache))
    return tuple(roles)


def _simple(network, chans, s):
    seen = {s}
    for c in chans:
        x = int(network.dst[c])
        if x in seen:
            return False
        seen.add(x)
    return True


def _combine(network, heads, tails, k):
    out = []
    for a in heads:
        for b in tails:
            chans = a.channels + b.channels
            if _simple(network, chans, a.source):
                out.append(Route(chans, a.source, b.target, a.weight + b.weight))
    out.sort(key=_route_key)
    return out[:k]


def tn_answer(network: Network, tn: int, s: int, t: int, amount: int, k: int = 5) -> list:
    """Up to ``k`` cheapest loopless s -> t routes through ``tn`` built from k-shortest legs."""
    heads = k_shortest_paths(network, s, tn, k, amount)
    if not heads:
        return []
    tails = k_shortest_paths(network, tn, t, k, amount)
    return _combine(network, heads, tails, k)


def pn_answer(network: Network, pn: ServerRole, s: int, t: int, amount: int, k: int = 5) -> list:
    cached = pn.cache.get(t)
    if cached is None:
        return []
    heads = k_shortest_paths(network, s, pn.node, k, amount)
    return _combine(network, heads, [cached], k)


def altruistic_answer(network: Network, s: int, t: int, amount: int) -> Optional[Route]:
    return optimal_route(network, s, t, amount)


def server_answer(network: Network, role: ServerRole, s: int, t: int, amount: int, k: int) -> list:
    if role.kind == ServerKind.TRAMPOLINE:
        return tn_answer(network, role.node, s, t, amount, k)
    if role.kind == ServerKind.PARTIAL:
        return pn_answer(network, role, s, t, amount, k)
    r = altruistic_answer(network, s, t, amount)
    return [] if r is None else [r]


def server_order(network: Network, servers: Iterable[ServerRole], policy: WalletPolicy, s: int) -> list:
    """Servers within the wallet's neighbourhood in seeded random order.

    Each server gets a priority hashed from ``(order_seed, s, node)``; the
    order never depends on the target, and restricting or enlarging the
    server set keeps the relative order of the remaining servers.
    """
    near = neighborhood(network, s, policy.neighborhood_h, policy.undirected)
    eligible = [r for r in servers if r.node in near]
    eligible.sort(key=lambda r: (hash64(policy.order_seed, s, r.node), r.node))
    return eligible


def discover_route(
    network: Network,
    servers: Iterable[ServerRole],
    policy: WalletPolicy,
    s: int,
    t: int,
    amount: int,
    availability: Episode = None,
    mode: Mode = Mode.EFFICIENCY,
) -> DiscoveryOutcome:
    """Run one discovery episode.

    Efficiency mode asks up to ``max_queries`` servers and keeps the cheapest
    answer. Effectiveness mode asks servers one at a time, tests their
    candidates in weight order against ``availability`` and stops at the
    first available one.
    """
    if s == t:
        raise ValueError("source and target must differ")
    order = server_order(network, servers, policy, s)
    if not order:
        return DiscoveryOutcome(None, 0, 0, frozenset(), False, no_server=True)
    k = policy.routes_per_server
    queried = []
    attempts = []
    chosen = None
    if Mode(mode) == Mode.EFFICIENCY:
        for role in order[: policy.max_queries]:
            queried.append(role.node)
            answers = server_answer(network, role, s, t, amount, k)
            if answers and (chosen is None or _route_key(answers[0]) < _route_key(chosen)):
                chosen = answers[0]
    else:
        if availability is None:
            raise ValueError("effectiveness mode needs an availability episode")
        for role in order[: policy.max_queries]:
            queried.append(role.node)
            for r in server_answer(network, role, s, t, amount, k):
                ok = availability.route_available(r)
                attempts.append(ok)
                if ok:
                    chosen = r
                    break
            if chosen is not None:
                break
    aware = set(queried)
    if chosen is not None:
        aware.update(chosen.intermediates(network))
    aware -= {s, t}
    return DiscoveryOutcome(
        chosen,
        len(queried),
        len(attempts),
        frozenset(aware),
        chosen is not None,
        attempts=tuple(attempts),
        queried=tuple(queried),
    )
