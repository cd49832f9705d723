"""Domain types for physical networks, slice requests and embeddings.

Node resources are vectors over named axes (``compute``, ``storage``, ...),
links carry a single bandwidth value.  Every physical connection is stored as
directed links; :meth:`PhysicalNetwork.add_edge` adds both directions.

The node order of a network is its insertion order.  Solvers that need a
deterministic candidate order ("ascending node id") use this order.
"""
from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import CapacityError, ParameterError, SpecificationError

EPS = 1e-9

NodeId = Hashable
LinkId = tuple  # (src, dst)
VirtualLink = tuple  # (v, w)


def as_vector(value, axes: Sequence[str]) -> tuple[float, ...]:
    """Turn a scalar or an ``{axis: value}`` mapping into a tuple ordered like ``axes``."""
    if isinstance(value, Mapping):
        unknown = set(value) - set(axes)
        if unknown:
            raise ParameterError(f"unknown resource axes {sorted(unknown)}; network axes are {list(axes)}")
        return tuple(float(value.get(a, 0.0)) for a in axes)
    if len(axes) != 1:
        raise ParameterError(f"scalar resource given but network has axes {list(axes)}")
    return (float(value),)


class PhysicalNetwork:
    """Capacitated directed graph with mutable remaining capacities."""

    def __init__(self, axes: Sequence[str] = ("compute",)):
        if not axes:
            raise ParameterError("a network needs at least one node resource axis")
        self.axes: tuple[str, ...] = tuple(axes)
        self.node_ids: list = []
        self.node_index: dict = {}
        self.node_cap: list[tuple[float, ...]] = []
        self.node_rem: list[list[float]] = []
        self.link_ends: list[tuple[int, int]] = []
        self.link_index: dict[tuple[int, int], int] = {}
        self.link_cap: list[float] = []
        self.link_rem: list[float] = []
        # out_adj[i] holds (dst_index, link_index) sorted by dst_index
        self.out_adj: list[list[tuple[int, int]]] = []

    # construction -------------------------------------------------------
    def add_node(self, node_id, capacity, remaining=None) -> None:
        if node_id in self.node_index:
            raise SpecificationError(f"duplicate node {node_id!r}")
        cap = as_vector(capacity, self.axes)
        rem = as_vector(remaining, self.axes) if remaining is not None else cap
        if any(c <= 0 for c in cap):
            raise SpecificationError(f"node {node_id!r} capacities must be positive, got {cap}")
        if any(r < -EPS or r > c + EPS for r, c in zip(rem, cap)):
            raise SpecificationError(f"node {node_id!r} remaining {rem} outside [0, {cap}]")
        self.node_index[node_id] = len(self.node_ids)
        self.node_ids.append(node_id)
        self.node_cap.append(cap)
        self.node_rem.append(list(rem))
        self.out_adj.append([])

    def add_link(self, src, dst, bandwidth: float, remaining: float | None = None) -> None:
        for n in (src, dst):
            if n not in self.node_index:
                raise SpecificationError(f"link ({src!r}, {dst!r}) references unknown node {n!r}")
        if src == dst:
            raise SpecificationError(f"self-loop on {src!r}")
        i, j = self.node_index[src], self.node_index[dst]
        if (i, j) in self.link_index:
            raise SpecificationError(f"duplicate link ({src!r}, {dst!r})")
        bandwidth = float(bandwidth)
        rem = bandwidth if remaining is None else float(remaining)
        if bandwidth <= 0:
            raise SpecificationError(f"link ({src!r}, {dst!r}) bandwidth must be positive")
        if rem < -EPS or rem > bandwidth + EPS:
            raise SpecificationError(f"link ({src!r}, {dst!r}) remaining {rem} outside [0, {bandwidth}]")
        idx = len(self.link_ends)
        self.link_index[(i, j)] = idx
        self.link_ends.append((i, j))
        self.link_cap.append(bandwidth)
        self.link_rem.append(rem)
        bisect.insort(self.out_adj[i], (j, idx))

    def add_edge(self, a, b, bandwidth: float) -> None:
        """Undirected connection: two directed links with equal capacity."""
        self.add_link(a, b, bandwidth)
        self.add_link(b, a, bandwidth)

    # queries --------------------------------------------------------------
    @property
    def nodes(self) -> list:
        return list(self.node_ids)

    @property
    def links(self) -> list[LinkId]:
        return [(self.node_ids[i], self.node_ids[j]) for i, j in self.link_ends]

    def __len__(self) -> int:
        return len(self.node_ids)

    def has_link(self, link: LinkId) -> bool:
        src, dst = link
        i, j = self.node_index.get(src), self.node_index.get(dst)
        return i is not None and j is not None and (i, j) in self.link_index

    def _link(self, link: LinkId) -> int:
        try:
            return self.link_index[(self.node_index[link[0]], self.node_index[link[1]])]
        except (KeyError, TypeError, IndexError):
            raise ParameterError(f"unknown link {link!r}") from None

    def _node(self, node_id) -> int:
        try:
            return self.node_index[node_id]
        except (KeyError, TypeError):
            raise ParameterError(f"unknown node {node_id!r}") from None

    def node_capacity(self, node_id) -> dict[str, float]:
        return dict(zip(self.axes, self.node_cap[self._node(node_id)]))

    def node_remaining(self, node_id) -> dict[str, float]:
        return dict(zip(self.axes, self.node_rem[self._node(node_id)]))

    def link_capacity(self, link: LinkId) -> float:
        return self.link_cap[self._link(link)]

    def link_remaining(self, link: LinkId) -> float:
        return self.link_rem[self._link(link)]

    def set_link_remaining(self, link: LinkId, value: float) -> None:
        idx = self._link(link)
        if value < -EPS or value > self.link_cap[idx] + EPS:
            raise ParameterError(f"remaining {value} outside [0, {self.link_cap[idx]}]")
        self.link_rem[idx] = float(value)

    def set_node_remaining(self, node_id, value) -> None:
        idx = self._node(node_id)
        vec = as_vector(value, self.axes)
        if any(r < -EPS or r > c + EPS for r, c in zip(vec, self.node_cap[idx])):
            raise ParameterError(f"remaining {vec} outside [0, {self.node_cap[idx]}]")
        self.node_rem[idx] = list(vec)

    def copy(self) -> "PhysicalNetwork":
        other = PhysicalNetwork.__new__(PhysicalNetwork)
        other.axes = self.axes
        other.node_ids = list(self.node_ids)
        other.node_index = dict(self.node_index)
        other.node_cap = list(self.node_cap)
        other.node_rem = [list(r) for r in self.node_rem]
        other.link_ends = list(self.link_ends)
        other.link_index = dict(self.link_index)
        other.link_cap = list(self.link_cap)
        other.link_rem = list(self.link_rem)
        other.out_adj = [list(a) for a in self.out_adj]
        return other

    def __eq__(self, other) -> bool:
        if not isinstance(other, PhysicalNetwork):
            return NotImplemented
        return (
            self.axes == other.axes
            and self.node_ids == other.node_ids
            and self.node_cap == other.node_cap
            and self.node_rem == other.node_rem
            and sorted(zip(self.links, self.link_cap, self.link_rem))
            == sorted(zip(other.links, other.link_cap, other.link_rem))
        )

    def __repr__(self) -> str:
        return f"PhysicalNetwork({len(self.node_ids)} nodes, {len(self.link_ends)} links, axes={self.axes})"


@dataclass
class VNF:
    id: str
    demand: dict[str, float]


@dataclass
class SliceRequest:
    """A linear-chain slice.  ``fixed_positions`` are 1-based."""

    slice_id: str
    vnfs: list[VNF]
    link_demands: dict[tuple[str, str], float]
    fixed_positions: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        ids = [v.id for v in self.vnfs]
        if not ids:
            raise SpecificationError(f"slice {self.slice_id!r} has no VNFs")
        if len(set(ids)) != len(ids):
            raise SpecificationError(f"slice {self.slice_id!r} has duplicate VNF ids")
        for v in self.vnfs:
            if not v.demand or any(d <= 0 for d in v.demand.values()):
                raise SpecificationError(f"VNF {v.id!r} of slice {self.slice_id!r} needs positive demands")
        n = len(ids)
        for v, p in self.fixed_positions.items():
            if v not in ids:
                raise SpecificationError(f"fixed position for unknown VNF {v!r}")
            if not 1 <= p <= n:
                raise SpecificationError(f"fixed position {p} of {v!r} outside [1, {n}]")
        if len(set(self.fixed_positions.values())) != len(self.fixed_positions):
            raise SpecificationError(f"slice {self.slice_id!r} pins two VNFs to one position")
        for (v, w), bw in self.link_demands.items():
            if v not in ids or w not in ids or v == w:
                raise SpecificationError(f"link demand ({v!r}, {w!r}) does not join two distinct VNFs")
            if bw <= 0:
                raise SpecificationError(f"link demand ({v!r}, {w!r}) must be positive")

    @property
    def vnf_ids(self) -> list[str]:
        return [v.id for v in self.vnfs]

    @property
    def flexible(self) -> list[str]:
        return [v.id for v in self.vnfs if v.id not in self.fixed_positions]

    def demand(self, vnf_id: str) -> dict[str, float]:
        for v in self.vnfs:
            if v.id == vnf_id:
                return v.demand
        raise ParameterError(f"slice {self.slice_id!r} has no VNF {vnf_id!r}")

    def __len__(self) -> int:
        return len(self.vnfs)


@dataclass
class SliceConfiguration:
    slice_id: str
    config_id: int
    positions: dict[str, int]
    chain: list[tuple[str, str]]

    @property
    def order(self) -> list[str]:
        return sorted(self.positions, key=self.positions.__getitem__)


@dataclass
class Embedding:
    slice_id: str
    config_id: int
    node_map: dict[str, NodeId]
    link_paths: dict[tuple[str, str], list[LinkId]]

    @property
    def hops(self) -> int:
        """Number of (virtual link, physical link) usage pairs."""
        return sum(len(p) for p in self.link_paths.values())


@dataclass
class AdmissionDecision:
    slice_id: str
    accepted: bool
    embedding: Embedding | None = None
    config: SliceConfiguration | None = None

    def __post_init__(self):
        if self.accepted != (self.embedding is not None):
            raise ParameterError(f"slice {self.slice_id!r}: accepted must hold exactly when an embedding is present")

    @property
    def config_id(self) -> int | None:
        return self.embedding.config_id if self.embedding is not None else None


@dataclass
class ScenarioResult:
    decisions: list[AdmissionDecision]
    objective: float
    per_config_counts: dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def accepted(self) -> int:
        return sum(d.accepted for d in self.decisions)

    @property
    def acceptance_rate(self) -> float | None:
        if not self.decisions:
            return None
        return self.accepted / len(self.decisions)


def objective_value(decisions: Iterable[AdmissionDecision], gamma: float) -> float:
    """gamma * (#accepted) - (1 - gamma) * (total physical-link usages)."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma}")
    accepted = 0
    hops = 0
    for d in decisions:
        if d.accepted:
            accepted += 1
            hops += d.embedding.hops
    return gamma * accepted - (1.0 - gamma) * hops


@dataclass(frozen=True)
class Violation:
    constraint: str
    slice_id: str | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, constraint, slice_id, message):
        self.violations.append(Violation(constraint, slice_id, message))

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(f"[{v.constraint}] {v.slice_id}: {v.message}" for v in self.violations)


def _check_configuration(report, s: SliceRequest, cfg: SliceConfiguration | None) -> bool:
    sid = s.slice_id
    if cfg is None:
        report.add("position", sid, "accepted slice carries no configuration")
        return False
    ok = True
    n = len(s)
    if set(cfg.positions) != set(s.vnf_ids) or sorted(cfg.positions.values()) != list(range(1, n + 1)):
        report.add("position", sid, f"positions {cfg.positions} are not a bijection onto 1..{n}")
        return False
    for v, p in s.fixed_positions.items():
        if cfg.positions[v] != p:
            report.add("fixed-position", sid, f"{v} sits at {cfg.positions[v]}, must be {p}")
            ok = False
    order = cfg.order
    expected = list(zip(order, order[1:]))
    if list(cfg.chain) != expected:
        report.add("chain-structure", sid, f"chain {cfg.chain} does not follow consecutive positions {expected}")
        ok = False
    for vw in cfg.chain:
        if tuple(vw) not in s.link_demands:
            report.add("chain-structure", sid, f"virtual link {vw} has no bandwidth demand")
            ok = False
    return ok


def validate_embedding(net: PhysicalNetwork, slices: Sequence[tuple[SliceRequest, AdmissionDecision]]) -> ValidationReport:
    """Check every accepted slice, and their joint resource use, against ``net``'s remaining capacities.

    Violations are collected, never raised.
    """
    report = ValidationReport()
    node_use = [[0.0] * len(net.axes) for _ in net.node_ids]
    link_use = [0.0] * len(net.link_ends)

    for s, d in slices:
        sid = s.slice_id
        if d.slice_id != sid:
            report.add("all-vnfs-mapped", sid, f"decision for {d.slice_id!r} paired with slice {sid!r}")
            continue
        if not d.accepted:
            continue
        emb = d.embedding
        cfg_ok = _check_configuration(report, s, d.config)

        mapped = set(emb.node_map)
        for v in s.vnf_ids:
            if v not in mapped:
                report.add("all-vnfs-mapped", sid, f"VNF {v} is not mapped")
        for v in mapped - set(s.vnf_ids):
            report.add("all-vnfs-mapped", sid, f"unknown VNF {v} in node map")
        hosts = Counter(emb.node_map.values())
        for node, count in hosts.items():
            if count > 1:
                report.add("one-vnf-per-node", sid, f"node {node!r} hosts {count} VNFs")
        for v, node in emb.node_map.items():
            if node not in net.node_index:
                report.add("all-vnfs-mapped", sid, f"VNF {v} mapped to unknown node {node!r}")
                continue
            if v in mapped and v in s.vnf_ids:
                vec = as_vector(s.demand(v), net.axes)
                row = node_use[net.node_index[node]]
                for a, r in enumerate(vec):
                    row[a] += r

        chain = [tuple(vw) for vw in d.config.chain] if (cfg_ok and d.config is not None) else None
        if chain is not None and set(map(tuple, emb.link_paths)) != set(chain):
            report.add("flow-conservation", sid, f"mapped virtual links {sorted(emb.link_paths)} differ from chain {chain}")
        for vw, path in emb.link_paths.items():
            v, w = vw
            src, dst = emb.node_map.get(v), emb.node_map.get(w)
            if src is None or dst is None:
                continue
            if not path:
                if src != dst:
                    report.add("flow-conservation", sid, f"virtual link {vw} has an empty path between distinct nodes")
                continue
            here = src
            bad = False
            for link in path:
                link = tuple(link)
                if not net.has_link(link):
                    report.add("flow-conservation", sid, f"virtual link {vw} uses unknown link {link!r}")
                    bad = True
                    break
                if link[0] != here:
                    report.add("flow-conservation", sid, f"virtual link {vw} path is not connected at {link!r}")
                    bad = True
                    break
                here = link[1]
                bw = s.link_demands.get(tuple(vw))
                if bw is not None:
                    link_use[net._link(link)] += bw
            if not bad and here != dst:
                report.add("flow-conservation", sid, f"virtual link {vw} path ends at {here!r}, expected {dst!r}")

    for i, row in enumerate(node_use):
        for a, used in enumerate(row):
            if used > net.node_rem[i][a] + EPS:
                report.add(
                    "node-capacity", None,
                    f"node {net.node_ids[i]!r} axis {net.axes[a]}: demand {used} > available {net.node_rem[i][a]}",
                )
    for l, used in enumerate(link_use):
        if used > net.link_rem[l] + EPS:
            i, j = net.link_ends[l]
            report.add(
                "link-capacity", None,
                f"link ({net.node_ids[i]!r}, {net.node_ids[j]!r}): demand {used} > available {net.link_rem[l]}",
            )
    return report


def _debits(net: PhysicalNetwork, s: SliceRequest, emb: Embedding):
    node_debit: dict[int, list[float]] = {}
    for v, node in emb.node_map.items():
        vec = as_vector(s.demand(v), net.axes)
        row = node_debit.setdefault(net._node(node), [0.0] * len(net.axes))
        for a, r in enumerate(vec):
            row[a] += r
    link_debit: dict[int, float] = {}
    for vw, path in emb.link_paths.items():
        bw = s.link_demands[tuple(vw)]
        for link in path:
            idx = net._link(tuple(link))
            link_debit[idx] = link_debit.get(idx, 0.0) + bw
    return node_debit, link_debit


def apply_embedding(net: PhysicalNetwork, s: SliceRequest, emb: Embedding) -> PhysicalNetwork:
    """Debit the embedding's demands from ``net`` in place.  All-or-nothing."""
    node_debit, link_debit = _debits(net, s, emb)
    for i, row in node_debit.items():
        for a, r in enumerate(row):
            if net.node_rem[i][a] - r < -EPS:
                raise CapacityError(
                    f"slice {s.slice_id!r}: node {net.node_ids[i]!r} axis {net.axes[a]} "
                    f"has {net.node_rem[i][a]}, needs {r}"
                )
    for l, r in link_debit.items():
        if net.link_rem[l] - r < -EPS:
            i, j = net.link_ends[l]
            raise CapacityError(
                f"slice {s.slice_id!r}: link ({net.node_ids[i]!r}, {net.node_ids[j]!r}) has {net.link_rem[l]}, needs {r}"
            )
    for i, row in node_debit.items():
        rem = net.node_rem[i]
        for a, r in enumerate(row):
            rem[a] = max(0.0, rem[a] - r)
    for l, r in link_debit.items():
        net.link_rem[l] = max(0.0, net.link_rem[l] - r)
    return net


def release_embedding(net: PhysicalNetwork, s: SliceRequest, emb: Embedding) -> PhysicalNetwork:
    """Inverse of :func:`apply_embedding`."""
    node_debit, link_debit = _debits(net, s, emb)
    for i, row in node_debit.items():
        rem, cap = net.node_rem[i], net.node_cap[i]
        for a, r in enumerate(row):
            rem[a] = min(cap[a], rem[a] + r)
    for l, r in link_debit.items():
        net.link_rem[l] = min(net.link_cap[l], net.link_rem[l] + r)
    return net
