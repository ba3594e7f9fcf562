import itertools

import numpy as np
import pytest

from trampsim.graph import neighborhood
from trampsim.pathing import all_pairs_shortest
from trampsim.topology import (
    AdversarialSpec,
    TopologyError,
    gen_adversarial,
    gen_clique,
    gen_scale_free,
    gen_sparse_ring,
)

from oracles import count_clique_routes, simple_paths

AMT = 10**6


def test_ring_1000():
    net = gen_sparse_ring(1000, seed=0)
    assert net.n == 1000 and net.m == 2000
    assert set(net.weights(AMT).tolist()) == {1}
    assert all(net.out_degree(v) == 2 for v in range(net.n))


def test_ring_3_forced():
    net = gen_sparse_ring(3, seed=4)
    assert net.n == 3 and net.m == 6


def test_ring_structure():
    net = gen_sparse_ring(50, seed=2)
    for v in range(net.n):
        dsts = sorted(int(net.dst[c]) for c in net.out_channels(v))
        assert (v + 1) % 50 in dsts
        assert v not in dsts
        assert len(dsts) == 2 and dsts[0] != dsts[1]
        for h in range(0, 10):
            assert len(neighborhood(net, v, h)) >= h


def test_ring_deterministic():
    a = gen_sparse_ring(200, seed=9)
    b = gen_sparse_ring(200, seed=9)
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)
    c = gen_sparse_ring(200, seed=10)
    assert not np.array_equal(a.dst, c.dst)


def test_ring_rejects_small():
    with pytest.raises(TopologyError):
        gen_sparse_ring(2)


def test_scale_free_tree_case():
    net = gen_scale_free(10, 1, seed=0)
    assert net.m == 18
    assert all(len(neighborhood(net, v, 9)) == 9 for v in range(10))


@pytest.mark.parametrize("m_attach", [1, 2, 3])
def test_scale_free_handshake(m_attach):
    net = gen_scale_free(60, m_attach, seed=1)
    links = net.m // 2
    degree = np.diff(net.out_indptr)
    assert degree.sum() == 2 * links
    assert links == m_attach * (m_attach + 1) // 2 + (60 - m_attach - 1) * m_attach
    assert set(net.weights(AMT).tolist()) == {1}


def test_scale_free_deterministic():
    a, b = gen_scale_free(80, 2, seed=3), gen_scale_free(80, 2, seed=3)
    assert np.array_equal(a.src, b.src) and np.array_equal(a.dst, b.dst)


def test_scale_free_rejects_params():
    with pytest.raises(TopologyError):
        gen_scale_free(3, 3)


def test_lemma1_shape():
    gen = gen_adversarial(AdversarialSpec("lemma1", q=2, M=5))
    assert gen.network.n == 7
    assert len(gen.tn_set) == 3
    w = gen.network.weights(AMT)
    assert sorted(set(w.tolist())) == [0, 1, 5]


@pytest.mark.parametrize("q", range(1, 7))
def test_lemma1_pigeonhole(q):
    gen = gen_adversarial(AdversarialSpec("lemma1", q=q, M=3))
    tns = sorted(gen.tn_set)
    for order in itertools.permutations(tns, q):
        t = gen.target_chooser(list(order))
        # the chosen outer node's own TN was never asked
        feeder = [int(gen.network.src[c]) for c in gen.network.in_channels(t) if gen.network.src[c] in gen.tn_set]
        assert feeder and feeder[0] not in order


def test_lemma3_chooser():
    gen = gen_adversarial(AdversarialSpec("lemma3", q=6, M=4))
    order = [3, 1, 4, 2]
    t = gen.target_chooser(order)
    assert [int(gen.network.src[c]) for c in gen.network.in_channels(t)] == [2]
    assert all(gen.network.out_degree(s) == 0 for s in range(5, 9))


def test_lemma2_rejects_small():
    with pytest.raises(TopologyError):
        gen_adversarial(AdversarialSpec("lemma2", M=1))


def test_spec_validation():
    with pytest.raises(TopologyError):
        AdversarialSpec("lemma1", q=0, M=3)


def test_lemma2_four_clique_has_five_routes():
    gen = gen_adversarial(AdversarialSpec("lemma2", M=4))
    assert len(simple_paths(gen.network, 1, 2, AMT)) == 5


@pytest.mark.parametrize("M", range(2, 8))
def test_lemma2_route_count_closed_form(M):
    gen = gen_adversarial(AdversarialSpec("lemma2", M=M))
    # TN is clique node 1, the target hangs off clique node 2
    assert len(simple_paths(gen.network, 1, 2, AMT)) == count_clique_routes(M)
    target = gen.network.n - 1
    assert len(simple_paths(gen.network, gen.source, target, AMT)) == count_clique_routes(M)


def test_clique():
    net = gen_clique(5, weight=3)
    assert net.m == 20
    assert np.all(all_pairs_shortest(net, AMT).dist[~np.eye(5, dtype=bool)] == 3)
