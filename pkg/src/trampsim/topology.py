"""Synthetic and adversarial topologies."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from .graph import Channel, Network, build_network

DEFAULT_CAPACITY = 10**9


class TopologyError(ValueError):
    pass


def _net(n, links, capacity):
    """``links`` is a list of (src, dst, base_fee)."""
    chans = [Channel(i, u, v, base_fee=w, proportional_rate=0, capacity=capacity) for i, (u, v, w) in enumerate(links)]
    return build_network(range(n), chans)


def gen_sparse_ring(n: int = 1000, seed: int = 0, capacity: int = DEFAULT_CAPACITY) -> Network:
    """Ring of ``n`` nodes; each node links to its successor and to one random other node, fee 1."""
    if n < 3:
        raise TopologyError("ring needs at least 3 nodes")
    rng = np.random.default_rng(seed)
    links = []
    for i in range(n):
        succ = (i + 1) % n
        # uniform over the n - 2 nodes that are neither i nor its successor
        r = int(rng.integers(n - 2))
        other = (succ + 1 + r) % n
        links.append((i, succ, 1))
        links.append((i, other, 1))
    return _net(n, links, capacity)


def gen_scale_free(n: int, m_attach: int = 1, seed: int = 0, capacity: int = DEFAULT_CAPACITY) -> Network:
    """Preferential attachment from an (m_attach + 1)-clique; each link becomes two fee-1 channels."""
    if not n > m_attach >= 1:
        raise TopologyError("need n > m_attach >= 1")
    rng = np.random.default_rng(seed)
    degree = np.zeros(n, dtype=np.int64)
    edges = []
    for i in range(m_attach + 1):
        for j in range(i + 1, m_attach + 1):
            edges.append((i, j))
            degree[i] += 1
            degree[j] += 1
    for new in range(m_attach + 1, n):
        p = degree[:new] / degree[:new].sum()
        targets = rng.choice(new, size=m_attach, replace=False, p=p)
        for t in sorted(int(x) for x in targets):
            edges.append((t, new))
            degree[t] += 1
            degree[new] += 1
    links = []
    for u, v in edges:
        links.append((u, v, 1))
        links.append((v, u, 1))
    return _net(n, links, capacity)


def gen_clique(n: int, weight: int = 1, capacity: int = DEFAULT_CAPACITY) -> Network:
    links = [(u, v, weight) for u in range(n) for v in range(n) if u != v]
    return _net(n, links, capacity)


class AdversarialKind(str, Enum):
    LEMMA1 = "lemma1"
    LEMMA2 = "lemma2"
    LEMMA3 = "lemma3"


@dataclass(frozen=True)
class AdversarialSpec:
    kind: AdversarialKind
    q: int = 1
    M: int = 1

    def __post_init__(self):
        if self.q < 1 or self.M < 1:
            raise TopologyError("q and M must be >= 1")


@dataclass(frozen=True)
class GeneratedTopology:
    """A worst-case instance.

    ``target_chooser`` maps the order in which a wallet would query the TNs
    to the target that hurts it most. ``blocked`` lists candidate-route
    presentation indices that must be reported unavailable (empty unless
    the construction needs it).
    """

    network: Network
    source: int
    tn_set: frozenset
    target_chooser: Callable[[Sequence[int]], int]
    spec: AdversarialSpec
    blocked: frozenset = field(default_factory=frozenset)


def _lemma1(spec):
    q, M = spec.q, spec.M
    k = q + 1
    tns = list(range(1, k + 1))
    outer = list(range(k + 1, 2 * k + 1))
    links = [(0, tn, 0) for tn in tns]
    links += [(tn, o, 1) for tn, o in zip(tns, outer)]
    links += [(a, b, M) for a in outer for b in outer if a != b]
    net = _net(2 * k + 1, links, DEFAULT_CAPACITY)
    outer_of = dict(zip(tns, outer))

    def choose(order):
        asked = set(list(order)[:q])
        for tn in tns:
            if tn not in asked:
                return outer_of[tn]
        raise TopologyError("all q + 1 TNs queried; order is longer than the budget")

    return GeneratedTopology(net, 0, frozenset(tns), choose, spec)


def _lemma2(spec):
    M = spec.M
    if M < 2:
        raise TopologyError("lemma2 needs a clique of at least 2 nodes")
    clique = list(range(1, M + 1))
    target = M + 1
    links = [(0, clique[0], 1)]
    links += [(a, b, 1) for a in clique for b in clique if a != b]
    links.append((clique[1], target, 1))
    net = _net(M + 2, links, DEFAULT_CAPACITY)
    return GeneratedTopology(net, 0, frozenset([clique[0]]), lambda order: target, spec, frozenset(range(M)))


def _lemma3(spec):
    M = spec.M
    tns = list(range(1, M + 1))
    sinks = list(range(M + 1, 2 * M + 1))
    links = [(0, tn, 1) for tn in tns] + [(tn, sk, 1) for tn, sk in zip(tns, sinks)]
    net = _net(2 * M + 1, links, DEFAULT_CAPACITY)
    sink_of = dict(zip(tns, sinks))

    def choose(order):
        order = list(order)
        if len(order) < M:
            raise TopologyError("query order must rank all M TNs")
        return sink_of[order[M - 1]]

    return GeneratedTopology(net, 0, frozenset(tns), choose, spec)


def gen_adversarial(spec: AdversarialSpec) -> GeneratedTopology:
    builders = {AdversarialKind.LEMMA1: _lemma1, AdversarialKind.LEMMA2: _lemma2, AdversarialKind.LEMMA3: _lemma3}
    return builders[AdversarialKind(spec.kind)](spec)
