"""Transaction workloads, per-episode metrics and closed-form bounds."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from .graph import Network, Route
from .rng import stream

GROUP_SIZE = 100


class WorkloadKind(str, Enum):
    ALL_PAIRS = "all-pairs"
    POWER_LAW = "power-law"


@dataclass(frozen=True)
class Workload:
    kind: WorkloadKind
    n: int
    activity: np.ndarray
    group_of: np.ndarray
    seed: int = 0

    @property
    def probabilities(self) -> np.ndarray:
        return self.activity / self.activity.sum()


def gen_workload(network: Network, kind: WorkloadKind = WorkloadKind.ALL_PAIRS, seed: int = 0,
                 group_size: int = GROUP_SIZE) -> Workload:
    """All-pairs (uniform activity) or power-law activity.

    Power law: nodes are shuffled into consecutive groups of ``group_size``
    and group ``i`` (0-based) gets activity ``2**-i``.
    """
    n = network.n
    kind = WorkloadKind(kind)
    if kind == WorkloadKind.ALL_PAIRS:
        return Workload(kind, n, np.ones(n), np.zeros(n, dtype=np.int64), seed)
    if n < group_size:
        raise ValueError(f"power-law workload needs at least {group_size} nodes")
    perm = stream(seed, "workload").permutation(n)
    group_of = np.empty(n, dtype=np.int64)
    group_of[perm] = np.arange(n) // group_size
    activity = np.ldexp(1.0, -group_of)
    return Workload(kind, n, activity, group_of, seed)


def sample_pair(workload: Workload, rng: np.random.Generator) -> tuple:
    """Draw (s, t) independently by activity, rejecting s == t."""
    if workload.n < 2:
        raise ValueError("need at least two nodes")
    p = workload.probabilities
    while True:
        s, t = rng.choice(workload.n, size=2, p=p)
        if s != t:
            return int(s), int(t)


def iter_pairs(workload: Workload):
    """Every ordered pair with s != t, in index order."""
    for s in range(workload.n):
        for t in range(workload.n):
            if s != t:
                yield s, t


def stretch(found_weight: float, optimal_weight: float) -> float:
    if math.isinf(optimal_weight):
        raise ValueError("optimal weight must be finite")
    if optimal_weight == 0:
        return 1.0 if found_weight == 0 else math.inf
    return found_weight / optimal_weight


def leak_rate(aware_nodes: Iterable[int], optimal_route: Optional[Route], network: Network) -> float:
    """Nodes made aware by discovery, relative to the optimal route's intermediates (floored at 1)."""
    aware = set(aware_nodes)
    base = 0
    if optimal_route is not None:
        base = len(set(optimal_route.intermediates(network)))
    return len(aware) / max(1, base)


def scale_free_success_prob(n: int, p: float, q: int) -> float:
    """Lower bound on finding an available route by querying the top-``q`` degree TNs.

    ``1 - (1 - p**(2 ln n / ln ln n)) ** (n (1 - 2**-q))`` with natural logs.
    """
    if n < 3:
        raise ValueError("n must be >= 3 for ln ln n > 0")
    if not 0.0 <= p <= 1.0 or q < 1:
        raise ValueError("need 0 <= p <= 1 and q >= 1")
    length = 2.0 * math.log(n) / math.log(math.log(n))
    per_route = p ** length
    trials = n * (1.0 - 2.0 ** -q)
    if per_route >= 1.0:
        return 1.0
    return max(0.0, -math.expm1(trials * math.log1p(-per_route)))


def tn_optimal_hit_prob(k: int) -> float:
    if k < 0:
        raise ValueError("k must be >= 0")
    return 1.0 - 2.0 ** -k


@dataclass
class MetricsRecord:
    source: int
    target: int
    optimal_weight: Optional[float]
    found_weight: Optional[float]
    stretch: Optional[float]
    queries_issued: int
    candidates_tried: int
    leak_rate: float
    success: bool
    no_server: bool = False
    h: Optional[int] = None
    q: Optional[int] = None
    tn_fraction: Optional[float] = None
    factor: Optional[float] = None
    p: Optional[float] = None
    pn_fraction: Optional[float] = None
    trial: int = 0

    @classmethod
    def columns(cls) -> list:
        return [f.name for f in fields(cls)]

    def as_dict(self) -> dict:
        return asdict(self)


AGGREGATE_COLUMNS = ["n_rows", "mean_stretch", "success_rate", "mean_queries", "mean_leak_rate",
                     "no_route_fraction", "mean_fee"]


def aggregate(records) -> dict:
    """Summary of one sweep point. Stretch and fee are averaged over successful rows with finite values."""
    records = list(records)
    n = len(records)
    if n == 0:
        return dict.fromkeys(AGGREGATE_COLUMNS) | {"n_rows": 0}
    ok = [r for r in records if r.success]
    stretches = [r.stretch for r in ok if r.stretch is not None and math.isfinite(r.stretch)]
    fees = [r.found_weight for r in ok if r.found_weight is not None]
    return {
        "n_rows": n,
        "mean_stretch": float(np.mean(stretches)) if stretches else None,
        "success_rate": len(ok) / n,
        "mean_queries": float(np.mean([r.queries_issued for r in records])),
        "mean_leak_rate": float(np.mean([r.leak_rate for r in records])),
        "no_route_fraction": 1.0 - len(ok) / n,
        "mean_fee": float(np.mean(fees)) if fees else None,
    }
