"""Command line entry point: ``trampsim <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import sys

from .experiments import FAMILIES, ConfigError, ExperimentConfig, build_topology, lemma_check, run_experiment
from .ingest import write_edgelist


def _floats(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _common(p):
    p.add_argument("--topology", default="ring",
                   help="ring | scale-free | clique | lemma1 | lemma2 | lemma3 | snapshot:<path> | edgelist:<path>")
    p.add_argument("--n", type=int, default=None, help="node count for generated topologies")
    p.add_argument("--m-attach", type=int, default=1)
    p.add_argument("--capacity", type=int, default=None, help="channel capacity (msat) for generated topologies")
    p.add_argument("--lemma-q", type=int, default=2)
    p.add_argument("--lemma-m", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)


def _sweep(p):
    p.add_argument("--tn-fraction", type=_floats, default=[0.1], help="comma separated list")
    p.add_argument("--tn-top-k", type=int, default=None, help="use the k highest-degree nodes as TNs")
    p.add_argument("--h", type=_ints, default=[1, 2, 3], help="neighbourhood radii, comma separated")
    p.add_argument("--q", type=int, default=5, help="query budget per discovery")
    p.add_argument("--routes-per-tn", type=int, default=5)
    p.add_argument("--amount", type=int, default=10**6, help="transaction size in msat")
    p.add_argument("--factor", type=_floats, default=[0.0], help="liquidity occupation factors")
    p.add_argument("--p", type=_floats, default=[], help="Bernoulli acceptance probabilities (overrides --factor)")
    p.add_argument("--pn-fraction", type=_floats, default=[0.0, 0.1])
    p.add_argument("--pn-cache", type=int, default=50)
    p.add_argument("--k", type=int, default=10, help="shortest routes tried by fee-effectiveness")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--pairs", default="sample:100", help="all | sample:<N>")
    p.add_argument("--workload", default="all-pairs", choices=["all-pairs", "power-law"])
    p.add_argument("--undirected", action="store_true", help="count neighbourhood hops in both directions")
    p.add_argument("--out", default=None, help="CSV path (stdout when omitted)")


def build_parser():
    parser = argparse.ArgumentParser(prog="trampsim", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", help="write a topology as an edge list")
    _common(g)
    g.add_argument("--out", required=True)
    for fam in FAMILIES:
        p = sub.add_parser(fam, help=f"run the {fam} experiment family")
        _common(p)
        _sweep(p)
    lc = sub.add_parser("lemma-check", help="verify the worst-case constructions")
    lc.add_argument("--amount", type=int, default=10**6)
    return parser


def _config(args) -> ExperimentConfig:
    return ExperimentConfig(
        family=args.command,
        topology=args.topology,
        n=args.n,
        m_attach=args.m_attach,
        capacity=args.capacity,
        lemma_q=args.lemma_q,
        lemma_m=args.lemma_m,
        tn_fraction=args.tn_fraction,
        tn_top_k=args.tn_top_k,
        h=args.h,
        q=args.q,
        routes_per_tn=args.routes_per_tn,
        amount=args.amount,
        factor=args.factor,
        p=args.p,
        pn_fraction=args.pn_fraction,
        pn_cache=args.pn_cache,
        k=args.k,
        trials=args.trials,
        seed=args.seed,
        pairs=args.pairs,
        workload=args.workload,
        undirected=args.undirected,
        out=args.out,
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "lemma-check":
        failed = 0
        for name, ok, detail in lemma_check(args.amount):
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
            failed += not ok
        return 1 if failed else 0
    try:
        if args.command == "gen":
            cfg = ExperimentConfig(topology=args.topology, n=args.n, m_attach=args.m_attach, capacity=args.capacity,
                                   lemma_q=args.lemma_q, lemma_m=args.lemma_m, seed=args.seed)
            cfg.validate()
            network, _ = build_topology(cfg)
            write_edgelist(network, args.out)
            print(f"wrote {network.n} nodes / {network.m} channels to {args.out}", file=sys.stderr)
            return 0
        result = run_experiment(_config(args))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if result.path is None:
        sys.stdout.write(result.text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
