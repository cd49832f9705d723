"""Fat-tree generation and JSON graph documents.

Graph document format::

    {"nodes": [{"id": "A", "compute": 8, "storage": 64}, ...],
     "edges": [{"a": "A", "b": "B", "bandwidth": 25}, ...],
     "defaults": {"compute": 8, "storage": 64, "bandwidth": 25}}

Every key of ``defaults`` other than ``bandwidth`` is a node resource axis.
Edges are undirected and become two directed links.  Nodes may carry a
``remaining`` mapping and edges ``remaining_ab`` / ``remaining_ba`` when the
document describes a partly used network.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .errors import ParameterError, ParseError, SpecificationError
from .model import PhysicalNetwork

DEFAULTS = {"compute": 8.0, "storage": 64.0, "bandwidth": 25.0}
BUNDLED = ("abilene", "cost266")


@dataclass
class FatTreePreset:
    name: str
    pods: int
    edges_per_pod: int
    aggs_per_pod: int
    hosts_per_edge: int
    cores: int
    agg_core_degree: int
    # (compute vCPU, storage GB) per layer
    host_capacity: tuple[float, float] = (2, 2)
    edge_capacity: tuple[float, float] = (6, 4)
    agg_capacity: tuple[float, float] = (12, 32)
    core_capacity: tuple[float, float] = (32, 120)
    # Gbps per tier
    host_edge_bw: float = 10
    edge_agg_bw: float = 20
    agg_core_bw: float = 20

    @property
    def node_count(self) -> int:
        return (
            self.cores
            + self.pods * (self.aggs_per_pod + self.edges_per_pod)
            + self.pods * self.edges_per_pod * self.hosts_per_edge
        )


PRESETS = {
    "2-ary": FatTreePreset("2-ary", pods=2, edges_per_pod=2, aggs_per_pod=2, hosts_per_edge=2, cores=2, agg_core_degree=1),
    "6-ary": FatTreePreset("6-ary", pods=6, edges_per_pod=3, aggs_per_pod=3, hosts_per_edge=3, cores=9, agg_core_degree=3),
}


def gen_fat_tree(preset: FatTreePreset | str) -> PhysicalNetwork:
    """Layered fat-tree with per-layer capacities.

    Hosts hang off one edge node each, edge and aggregation nodes of a pod
    form a complete bipartite graph, and aggregation node ``g`` (counted over
    all pods) connects to cores ``g*d, g*d+1, ..., g*d+d-1`` modulo the core
    count, ``d`` being ``agg_core_degree``.
    """
    if isinstance(preset, str):
        try:
            preset = PRESETS[preset]
        except KeyError:
            raise ParameterError(f"unknown fat-tree preset {preset!r}; known: {sorted(PRESETS)}") from None
    p = preset
    counts = (p.pods, p.edges_per_pod, p.aggs_per_pod, p.hosts_per_edge, p.cores, p.agg_core_degree)
    if any(c < 1 for c in counts):
        raise ParameterError(f"fat-tree counts must be >= 1, got {counts}")
    if p.agg_core_degree > p.cores:
        raise ParameterError(f"agg_core_degree {p.agg_core_degree} exceeds core count {p.cores}")

    net = PhysicalNetwork(axes=("compute", "storage"))

    def cap(pair):
        return {"compute": pair[0], "storage": pair[1]}

    cores = [f"core{c}" for c in range(p.cores)]
    for c in cores:
        net.add_node(c, cap(p.core_capacity))
    aggs, edges = [], []
    for pod in range(p.pods):
        pod_aggs = [f"agg{pod}_{a}" for a in range(p.aggs_per_pod)]
        for a in pod_aggs:
            net.add_node(a, cap(p.agg_capacity))
        aggs.append(pod_aggs)
    for pod in range(p.pods):
        pod_edges = [f"edge{pod}_{e}" for e in range(p.edges_per_pod)]
        for e in pod_edges:
            net.add_node(e, cap(p.edge_capacity))
        edges.append(pod_edges)
    hosts = []
    for pod in range(p.pods):
        for e in range(p.edges_per_pod):
            for h in range(p.hosts_per_edge):
                name = f"host{pod}_{e}_{h}"
                net.add_node(name, cap(p.host_capacity))
                hosts.append((name, edges[pod][e]))

    for name, edge in hosts:
        net.add_edge(name, edge, p.host_edge_bw)
    for pod in range(p.pods):
        for e in edges[pod]:
            for a in aggs[pod]:
                net.add_edge(e, a, p.edge_agg_bw)
    g = 0
    for pod in range(p.pods):
        for a in aggs[pod]:
            for t in range(p.agg_core_degree):
                net.add_edge(a, cores[(g * p.agg_core_degree + t) % p.cores], p.agg_core_bw)
            g += 1
    return net


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def load_graph(document) -> PhysicalNetwork:
    """Build a network from a graph document (JSON text or already-parsed dict)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(document, dict):
        raise ParseError("top level: expected an object")
    defaults = dict(DEFAULTS)
    raw_defaults = document.get("defaults")
    if raw_defaults is not None:
        if not isinstance(raw_defaults, dict) or "bandwidth" not in raw_defaults or len(raw_defaults) < 2:
            raise ParseError("defaults: expected an object with 'bandwidth' and at least one node axis")
        defaults = {k: _number(v, f"defaults.{k}") for k, v in raw_defaults.items()}
    axes = tuple(k for k in defaults if k != "bandwidth")
    nodes = document.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise ParseError("nodes: expected a non-empty list")
    edges = document.get("edges", [])
    if not isinstance(edges, list):
        raise ParseError("edges: expected a list")

    net = PhysicalNetwork(axes=axes)
    allowed_node_keys = {"id", "remaining", *axes}
    for k, node in enumerate(nodes):
        where = f"nodes[{k}]"
        if not isinstance(node, dict) or "id" not in node:
            raise ParseError(f"{where}: expected an object with an 'id'")
        extra = set(node) - allowed_node_keys
        if extra:
            raise ParseError(f"{where}: unknown keys {sorted(extra)}")
        capacity = {a: _number(node.get(a, defaults[a]), f"{where}.{a}") for a in axes}
        remaining = node.get("remaining")
        if remaining is not None:
            if not isinstance(remaining, dict):
                raise ParseError(f"{where}.remaining: expected an object")
            remaining = {a: _number(remaining.get(a, capacity[a]), f"{where}.remaining.{a}") for a in axes}
        try:
            net.add_node(node["id"], capacity, remaining)
        except SpecificationError as exc:
            raise ParseError(f"{where}: {exc}") from None

    seen = set()
    for k, edge in enumerate(edges):
        where = f"edges[{k}]"
        if not isinstance(edge, dict) or "a" not in edge or "b" not in edge:
            raise ParseError(f"{where}: expected an object with 'a' and 'b'")
        extra = set(edge) - {"a", "b", "bandwidth", "remaining_ab", "remaining_ba"}
        if extra:
            raise ParseError(f"{where}: unknown keys {sorted(extra)}")
        a, b = edge["a"], edge["b"]
        for end in (a, b):
            if end not in net.node_index:
                raise ParseError(f"{where}: dangling endpoint {end!r}")
        key = frozenset((a, b))
        if key in seen or a == b:
            raise ParseError(f"{where}: duplicate edge or self-loop {a!r} - {b!r}")
        seen.add(key)
        bw = _number(edge.get("bandwidth", defaults["bandwidth"]), f"{where}.bandwidth")
        rem_ab = edge.get("remaining_ab")
        rem_ba = edge.get("remaining_ba")
        try:
            net.add_link(a, b, bw, None if rem_ab is None else _number(rem_ab, f"{where}.remaining_ab"))
            net.add_link(b, a, bw, None if rem_ba is None else _number(rem_ba, f"{where}.remaining_ba"))
        except SpecificationError as exc:
            raise ParseError(f"{where}: {exc}") from None
    return net


def dump_graph(net: PhysicalNetwork) -> dict:
    """Inverse of :func:`load_graph` for networks whose links come in equal-capacity pairs."""
    if "bandwidth" in net.axes:
        raise ParameterError("a node axis named 'bandwidth' cannot be serialized")
    nodes = []
    for i, node_id in enumerate(net.node_ids):
        entry = {"id": node_id}
        entry.update(zip(net.axes, net.node_cap[i]))
        if list(net.node_rem[i]) != list(net.node_cap[i]):
            entry["remaining"] = dict(zip(net.axes, net.node_rem[i]))
        nodes.append(entry)
    edges = []
    done = set()
    for l, (i, j) in enumerate(net.link_ends):
        if (i, j) in done:
            continue
        back = net.link_index.get((j, i))
        if back is None or net.link_cap[back] != net.link_cap[l]:
            raise ParameterError(
                f"link ({net.node_ids[i]!r}, {net.node_ids[j]!r}) has no equal-capacity reverse link"
            )
        done.update({(i, j), (j, i)})
        entry = {"a": net.node_ids[i], "b": net.node_ids[j], "bandwidth": net.link_cap[l]}
        if net.link_rem[l] != net.link_cap[l]:
            entry["remaining_ab"] = net.link_rem[l]
        if net.link_rem[back] != net.link_cap[back]:
            entry["remaining_ba"] = net.link_rem[back]
        edges.append(entry)
    defaults = {a: DEFAULTS.get(a, 1.0) for a in net.axes}
    defaults["bandwidth"] = DEFAULTS["bandwidth"]
    return {"defaults": defaults, "nodes": nodes, "edges": edges}


def bundled_graph(name: str) -> PhysicalNetwork:
    """One of the SNDlib-derived topologies shipped with the package."""
    if name.lower() not in BUNDLED:
        raise ParameterError(f"unknown bundled topology {name!r}; known: {list(BUNDLED)}")
    text = resources.files("flexslice").joinpath("data").joinpath(f"{name.lower()}.json").read_text()
    return load_graph(text)


def resolve_topology(name_or_path: str) -> PhysicalNetwork:
    """Fat-tree preset name, bundled topology name, or path to a graph document."""
    if name_or_path in PRESETS:
        return gen_fat_tree(name_or_path)
    if name_or_path.lower() in BUNDLED:
        return bundled_graph(name_or_path)
    try:
        with open(name_or_path) as f:
            return load_graph(f.read())
    except FileNotFoundError:
        raise ParameterError(
            f"topology {name_or_path!r} is neither a preset {sorted(PRESETS)}, "
            f"a bundled graph {list(BUNDLED)}, nor a readable file"
        ) from None
