"""Offchain network model: nodes, directed fee-charging channels, routes."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

PPM = 10**6


class NetworkError(ValueError):
    """Base class for construction errors."""


class DuplicateChannelError(NetworkError):
    pass


class DanglingEndpointError(NetworkError):
    pass


class SelfLoopError(NetworkError):
    pass


class RouteError(ValueError):
    """Raised when a route is not contiguous."""


@dataclass(frozen=True)
class Channel:
    """One direction of a payment channel. Fees in msat, rate in parts per million."""

    id: Hashable
    src: Hashable
    dst: Hashable
    base_fee: int = 0
    proportional_rate: int = 0
    capacity: int = 0

    def __post_init__(self):
        if self.base_fee < 0 or self.proportional_rate < 0 or self.capacity < 0:
            raise NetworkError(f"channel {self.id!r}: negative fee or capacity")


def channel_weight(channel, amount: int) -> int:
    """Fee charged by ``channel`` for forwarding ``amount`` msat (floored to whole msat)."""
    if amount <= 0:
        raise ValueError("amount must be positive")
    return channel.base_fee + (amount * channel.proportional_rate) // PPM


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable directed multigraph.

    Nodes and channels are addressed by dense indices; ``node_keys`` and
    ``channels[i].id`` keep the caller's identifiers. ``src``/``dst`` hold the
    endpoint indices of every channel, ``out_indptr``/``out_chan`` is the
    outgoing CSR (channel indices per node, in index order) and
    ``in_indptr``/``in_chan`` the incoming one.
    """

    node_keys: tuple
    channels: tuple
    src: np.ndarray
    dst: np.ndarray
    base_fee: np.ndarray
    rate: np.ndarray
    capacity: np.ndarray
    out_indptr: np.ndarray
    out_chan: np.ndarray
    in_indptr: np.ndarray
    in_chan: np.ndarray
    _index: dict = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.node_keys)

    @property
    def m(self) -> int:
        return len(self.channels)

    def index(self, key) -> int:
        return self._index[key]

    def out_channels(self, v: int) -> np.ndarray:
        return self.out_chan[self.out_indptr[v]:self.out_indptr[v + 1]]

    def in_channels(self, v: int) -> np.ndarray:
        return self.in_chan[self.in_indptr[v]:self.in_indptr[v + 1]]

    def out_degree(self, v: int) -> int:
        return int(self.out_indptr[v + 1] - self.out_indptr[v])

    def in_degree(self, v: int) -> int:
        return int(self.in_indptr[v + 1] - self.in_indptr[v])

    def weights(self, amount: int) -> np.ndarray:
        """Per-channel fee at ``amount`` as exact int64."""
        if amount <= 0:
            raise ValueError("amount must be positive")
        key = ("weights", amount)
        w = self._cache.get(key)
        if w is None:
            # amount * rate can exceed int64 for large snapshots; go through Python ints
            prop = [(amount * int(r)) // PPM for r in self.rate.tolist()]
            w = self.base_fee + np.asarray(prop, dtype=np.int64)
            w.setflags(write=False)
            self._cache[key] = w
        return w

    def adjacency_weights(self, amount: int) -> np.ndarray:
        """Dense n x n matrix of the cheapest parallel channel, inf where absent, 0 on the diagonal."""
        key = ("adjacency", amount)
        a = self._cache.get(key)
        if a is None:
            a = np.full((self.n, self.n), np.inf)
            np.minimum.at(a, (self.src, self.dst), self.weights(amount).astype(np.float64))
            np.fill_diagonal(a, 0.0)
            a.setflags(write=False)
            self._cache[key] = a
        return a


def _csr(keys: np.ndarray, n: int):
    order = np.argsort(keys, kind="stable")
    counts = np.bincount(keys, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, order.astype(np.int64)


def build_network(nodes: Iterable, channels: Iterable[Channel]) -> Network:
    """Build a :class:`Network`; node indices follow the order of ``nodes``."""
    node_keys = tuple(nodes)
    index = {}
    for i, key in enumerate(node_keys):
        if key in index:
            raise NetworkError(f"duplicate node {key!r}")
        index[key] = i
    chans = tuple(channels)
    seen = set()
    src, dst = [], []
    for ch in chans:
        if ch.id in seen:
            raise DuplicateChannelError(f"duplicate channel id {ch.id!r}")
        seen.add(ch.id)
        if ch.src not in index or ch.dst not in index:
            raise DanglingEndpointError(f"channel {ch.id!r} references unknown node")
        if ch.src == ch.dst:
            raise SelfLoopError(f"channel {ch.id!r} is a self-loop")
        src.append(index[ch.src])
        dst.append(index[ch.dst])
    n = len(node_keys)
    src_a = np.asarray(src, dtype=np.int64)
    dst_a = np.asarray(dst, dtype=np.int64)
    out_indptr, out_chan = _csr(src_a, n)
    in_indptr, in_chan = _csr(dst_a, n)
    arrays = [
        src_a,
        dst_a,
        np.asarray([c.base_fee for c in chans], dtype=np.int64),
        np.asarray([c.proportional_rate for c in chans], dtype=np.int64),
        np.asarray([c.capacity for c in chans], dtype=np.int64),
        out_indptr,
        out_chan,
        in_indptr,
        in_chan,
    ]
    for a in arrays:
        a.setflags(write=False)
    return Network(node_keys, chans, *arrays, _index=index)


@dataclass(frozen=True)
class Route:
    """Ordered channel indices from ``source`` to ``target``.

    ``weight`` is the fee total at the amount the route was built for.
    """

    channels: tuple
    source: int
    target: int
    weight: int = 0

    def nodes(self, network: Network) -> list:
        out = [self.source]
        out.extend(int(network.dst[c]) for c in self.channels)
        return out

    def intermediates(self, network: Network) -> list:
        return self.nodes(network)[1:-1]


def validate_route(network: Network, channels: Sequence[int], s: int, t: int) -> bool:
    if len(channels) == 0:
        return s == t
    if network.src[channels[0]] != s or network.dst[channels[-1]] != t:
        return False
    for a, b in zip(channels, channels[1:]):
        if network.dst[a] != network.src[b]:
            return False
    return True


def route_weight(network: Network, route: Route, amount: int) -> int:
    """Sum of channel fees along ``route`` at ``amount``."""
    if not validate_route(network, route.channels, route.source, route.target):
        raise RouteError("route is not contiguous")
    w = network.weights(amount)
    return int(sum(int(w[c]) for c in route.channels))


def make_route(network: Network, channels: Sequence[int], s: int, t: int, amount: int) -> Route:
    chans = tuple(int(c) for c in channels)
    if not validate_route(network, chans, s, t):
        raise RouteError(f"channels {chans} do not form a route {s}->{t}")
    w = network.weights(amount)
    return Route(chans, s, t, int(sum(int(w[c]) for c in chans)))


def concat_routes(network: Network, first: Route, second: Route, amount: int) -> Route:
    return make_route(network, first.channels + second.channels, first.source, second.target, amount)


def neighborhood(network: Network, v: int, h: int, undirected: bool = False) -> set:
    """Nodes other than ``v`` within ``h`` hops along outgoing channels."""
    if h < 0:
        raise ValueError("h must be >= 0")
    seen = {v}
    frontier = deque([(v, 0)])
    while frontier:
        u, d = frontier.popleft()
        if d == h:
            continue
        nxt = network.dst[network.out_channels(u)].tolist()
        if undirected:
            nxt += network.src[network.in_channels(u)].tolist()
        for x in nxt:
            if x not in seen:
                seen.add(x)
                frontier.append((x, d + 1))
    seen.discard(v)
    return seen


def hop_distances(network: Network, v: int, undirected: bool = False) -> np.ndarray:
    """BFS hop count from ``v`` to every node (-1 when unreachable)."""
    hops = np.full(network.n, -1, dtype=np.int64)
    hops[v] = 0
    frontier = deque([v])
    while frontier:
        u = frontier.popleft()
        nxt = network.dst[network.out_channels(u)].tolist()
        if undirected:
            nxt += network.src[network.in_channels(u)].tolist()
        for x in nxt:
            if hops[x] < 0:
                hops[x] = hops[u] + 1
                frontier.append(x)
    return hops
