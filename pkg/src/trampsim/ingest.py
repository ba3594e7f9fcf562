"""Readers and writers for network files.

``describegraph`` snapshots (JSON with ``nodes`` and ``edges``) become one
directed channel per enabled edge policy. The edge-list format is one line per
channel: ``src dst base_fee rate capacity``.
"""
from __future__ import annotations

import json
from pathlib import Path

from .graph import Channel, Network, build_network

SAT = 1000


class SnapshotParseError(ValueError):
    pass


class SnapshotValidationError(ValueError):
    pass


def _int(value, where):
    if isinstance(value, bool):
        raise SnapshotParseError(f"{where}: expected integer, got {value!r}")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise SnapshotParseError(f"{where}: expected integer, got {value!r}") from None


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SnapshotParseError(f"{where}: missing field {key!r}")
    return obj[key]


def parse_describegraph(data) -> Network:
    """Build a Network from ``lncli describegraph`` output (bytes, str or parsed dict)."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise SnapshotParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    else:
        doc = data
    if not isinstance(doc, dict):
        raise SnapshotParseError("top level: expected an object")
    nodes = _require(doc, "nodes", "top level")
    edges = _require(doc, "edges", "top level")
    if not isinstance(nodes, list) or not isinstance(edges, list):
        raise SnapshotParseError("top level: 'nodes' and 'edges' must be arrays")

    keys = []
    known = set()

    def add(key):
        if key not in known:
            known.add(key)
            keys.append(key)

    for i, node in enumerate(nodes):
        add(str(_require(node, "pub_key", f"nodes[{i}]")))

    channels = []
    for i, edge in enumerate(edges):
        where = f"edges[{i}]"
        cid = str(_require(edge, "channel_id", where))
        a = str(_require(edge, "node1_pub", where))
        b = str(_require(edge, "node2_pub", where))
        cap_sat = _int(_require(edge, "capacity", where), f"{where}.capacity")
        if cap_sat < 0:
            raise SnapshotValidationError(f"{where}.capacity: negative")
        add(a)
        add(b)
        for side, src, dst in ((1, a, b), (2, b, a)):
            pol = edge.get(f"node{side}_policy")
            if pol is None:
                continue
            pwhere = f"{where}.node{side}_policy"
            if not isinstance(pol, dict):
                raise SnapshotParseError(f"{pwhere}: expected an object")
            if pol.get("disabled", False):
                continue
            base = _int(pol.get("fee_base_msat", 0), f"{pwhere}.fee_base_msat")
            rate = _int(pol.get("fee_rate_milli_msat", 0), f"{pwhere}.fee_rate_milli_msat")
            if base < 0 or rate < 0:
                raise SnapshotValidationError(f"{pwhere}: negative fee")
            if src == dst:
                continue
            channels.append(Channel((cid, side), src, dst, base, rate, cap_sat * SAT))
    return build_network(keys, channels)


def load_describegraph(path) -> Network:
    return parse_describegraph(Path(path).read_bytes())


def to_describegraph(network: Network) -> dict:
    """Inverse of :func:`parse_describegraph` for networks it produced."""
    edges = {}
    for ch in network.channels:
        cid, side = ch.id
        e = edges.setdefault(cid, {"channel_id": cid, "capacity": str(ch.capacity // SAT)})
        a, b = (ch.src, ch.dst) if side == 1 else (ch.dst, ch.src)
        e["node1_pub"], e["node2_pub"] = a, b
        e[f"node{side}_policy"] = {
            "fee_base_msat": str(ch.base_fee),
            "fee_rate_milli_msat": str(ch.proportional_rate),
            "disabled": False,
        }
    return {"nodes": [{"pub_key": k} for k in network.node_keys], "edges": list(edges.values())}


def write_edgelist(network: Network, path) -> None:
    lines = [
        f"{network.node_keys[s]} {network.node_keys[d]} {b} {r} {c}"
        for s, d, b, r, c in zip(
            network.src.tolist(), network.dst.tolist(), network.base_fee.tolist(),
            network.rate.tolist(), network.capacity.tolist(),
        )
    ]
    Path(path).write_text("".join(line + "\n" for line in lines))


def read_edgelist(path) -> Network:
    """Load an edge list; node keys are kept as strings in order of first appearance."""
    keys, known, chans = [], set(), []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 5:
            raise SnapshotParseError(f"line {lineno}: expected 5 fields, got {len(parts)}")
        src, dst = parts[0], parts[1]
        base, rate, cap = (_int(x, f"line {lineno}") for x in parts[2:])
        for k in (src, dst):
            if k not in known:
                known.add(k)
                keys.append(k)
        chans.append(Channel(len(chans), src, dst, base, rate, cap))
    return build_network(keys, chans)
