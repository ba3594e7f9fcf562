import math

import numpy as np
import pytest

from trampsim.graph import Channel, build_network, make_route
from trampsim.metrics import (
    MetricsRecord,
    WorkloadKind,
    aggregate,
    gen_workload,
    iter_pairs,
    leak_rate,
    sample_pair,
    scale_free_success_prob,
    stretch,
    tn_optimal_hit_prob,
)
from trampsim.topology import gen_sparse_ring


def test_power_law_groups():
    wl = gen_workload(gen_sparse_ring(300, seed=0), WorkloadKind.POWER_LAW, seed=1)
    assert sorted(set(wl.activity.tolist()), reverse=True) == [1.0, 0.5, 0.25]
    assert np.bincount(wl.group_of).tolist() == [100, 100, 100]
    assert wl.activity.sum() == 100 * (1 + 0.5 + 0.25)
    assert wl.probabilities.sum() == pytest.approx(1.0)


def test_power_law_needs_a_full_group():
    with pytest.raises(ValueError):
        gen_workload(gen_sparse_ring(50, seed=0), WorkloadKind.POWER_LAW)


def test_all_pairs_enumeration():
    wl = gen_workload(gen_sparse_ring(6, seed=0))
    pairs = list(iter_pairs(wl))
    assert len(pairs) == 30 and len(set(pairs)) == 30
    assert all(s != t for s, t in pairs)


def test_sample_pair_two_nodes_balanced():
    net = build_network("ab", [Channel(0, "a", "b", 1), Channel(1, "b", "a", 1)])
    wl = gen_workload(net)
    rng = np.random.default_rng(0)
    draws = [sample_pair(wl, rng) for _ in range(5000)]
    assert abs(sum(s == 0 for s, _ in draws) / len(draws) - 0.5) < 0.02


def test_sample_pair_power_law_ratio():
    wl = gen_workload(gen_sparse_ring(200, seed=0), WorkloadKind.POWER_LAW, seed=2)
    rng = np.random.default_rng(3)
    counts = np.zeros(2)
    for _ in range(20000):
        s, _ = sample_pair(wl, rng)
        counts[wl.group_of[s]] += 1
    # two groups with activity 1 and 1/2, minus the s != t rejection which is symmetric enough
    assert abs(counts[0] / counts[1] - 2.0) / 2.0 < 0.05


def test_stretch_cases():
    assert stretch(6, 3) == 2.0
    assert stretch(0, 0) == 1.0
    assert stretch(5, 0) == math.inf
    with pytest.raises(ValueError):
        stretch(1, math.inf)


def test_leak_rate_cases():
    chans = [Channel(i, i, i + 1, 1) for i in range(3)]
    net = build_network(range(4), chans)
    opt = make_route(net, (0, 1, 2), 0, 3, 10**6)
    assert leak_rate({1}, opt, net) == 0.5
    assert leak_rate({1, 2, 5, 6, 7, 8, 9, 10}, opt, net) == 4.0
    direct = make_route(net, (0,), 0, 1, 10**6)
    assert leak_rate({2, 3}, direct, net) == 2.0
    assert leak_rate({2, 3}, None, net) == 2.0
    assert leak_rate(set(), opt, net) == 0.0


def test_scale_free_bound_edges():
    assert scale_free_success_prob(4000, 0.0, 5) == 0.0
    assert scale_free_success_prob(4000, 1.0, 5) == 1.0
    assert scale_free_success_prob(4000, 0.2, 5) == pytest.approx(0.0127296292143, rel=1e-9)
    with pytest.raises(ValueError):
        scale_free_success_prob(2, 0.5, 1)
    with pytest.raises(ValueError):
        scale_free_success_prob(100, 1.5, 1)


def test_scale_free_bound_monotone_in_p():
    vals = [scale_free_success_prob(1000, p, 3) for p in np.linspace(0, 1, 21)]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_tn_hit_prob():
    assert tn_optimal_hit_prob(0) == 0.0
    assert tn_optimal_hit_prob(10) == 0.9990234375
    vals = [tn_optimal_hit_prob(k) for k in range(21)]
    assert all(a < b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        tn_optimal_hit_prob(-1)


def _rec(success, fw=None, st=None, q=1, leak=1.0):
    return MetricsRecord(0, 1, 2.0, fw, st, q, 1, leak, success)


def test_aggregate():
    rows = [_rec(True, 4.0, 2.0, q=1), _rec(True, 2.0, 1.0, q=3), _rec(False, q=2, leak=0.0)]
    agg = aggregate(rows)
    assert agg["n_rows"] == 3
    assert agg["mean_stretch"] == 1.5
    assert agg["mean_fee"] == 3.0
    assert agg["success_rate"] == pytest.approx(2 / 3)
    assert agg["no_route_fraction"] == pytest.approx(1 / 3)
    assert agg["mean_queries"] == 2.0
    assert agg["mean_leak_rate"] == pytest.approx(2 / 3)
    assert aggregate([])["n_rows"] == 0
