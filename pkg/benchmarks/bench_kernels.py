"""Time the numba kernels against the numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 400] [--repeat 3]

Both paths are imported from the same module, so the flag in
``TRAMPSIM_NO_NUMBA`` does not matter here.
"""
import argparse
import time

import numpy as np

from trampsim import kernels
from trampsim._accel import HAS_NUMBA
from trampsim.topology import gen_sparse_ring


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not HAS_NUMBA:
        print("numba disabled or missing; only the numpy path is timed")

    net = gen_sparse_ring(args.n, seed=0)
    adj = np.array(net.adjacency_weights(10**6))
    fwd = (net.out_indptr, net.dst[net.out_chan], net.out_chan)
    w = net.weights(10**6).astype(float)
    ok_n = np.ones(net.n, dtype=bool)
    ok_c = np.ones(net.m, dtype=bool)

    cases = {
        "floyd_warshall": (lambda f: (lambda: f(adj.copy()))),
        "min_plus": (lambda f: (lambda: f(adj, adj))),
        "dijkstra x50": (lambda f: (lambda: [f(*fwd, w, s, ok_n, ok_c) for s in range(50)])),
    }
    names = {"floyd_warshall": "floyd_warshall", "min_plus": "min_plus", "dijkstra x50": "dijkstra"}
    print(f"n={args.n}  channels={net.m}")
    print(f"{'kernel':<16}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    for label, make in cases.items():
        key = names[label]
        t_np, ref = best_of(make(kernels.KERNELS_NUMPY[key]), args.repeat)
        if HAS_NUMBA:
            make(kernels.KERNELS_ACTIVE[key])()  # compile
            t_nb, got = best_of(make(kernels.KERNELS_ACTIVE[key]), args.repeat)
            if key != "dijkstra":
                assert np.array_equal(ref, got)
            print(f"{label:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
        else:
            print(f"{label:<16}{t_np:>12.4f}{'-':>12}{'-':>10}")


if __name__ == "__main__":
    main()
