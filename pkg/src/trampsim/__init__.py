"""Route discovery with selfish trampoline nodes in payment-channel networks."""
from .availability import AvailabilityModel, Episode, channel_accepts, route_available
from .discovery import (
    DiscoveryOutcome,
    Mode,
    ServerKind,
    ServerRole,
    WalletPolicy,
    altruistic_answer,
    assign_partial_nodes,
    assign_servers,
    discover_route,
    optimal_route,
    pn_answer,
    tn_answer,
)
from .graph import Channel, Network, Route, build_network, channel_weight, neighborhood, route_weight, validate_route
from .ingest import parse_describegraph
from .metrics import gen_workload, leak_rate, sample_pair, scale_free_success_prob, stretch, tn_optimal_hit_prob
from .pathing import all_pairs_shortest, hop_limited_distances, k_shortest_paths, shortest_path_single_source
from .topology import AdversarialSpec, gen_adversarial, gen_clique, gen_scale_free, gen_sparse_ring

__version__ = "0.1.0"
