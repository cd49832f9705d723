"""Best-Fit Neighbor greedy baseline.

Node "size" is the bottleneck share ``min_axis(remaining / capacity)``.  The
first VNF goes to the largest feasible node; every later VNF goes to the
largest feasible unused node among those closest (in hops over links that can
carry the virtual link) to the node hosting the previous VNF.
"""
from __future__ import annotations

import random
import time
from typing import Sequence

from .configs import enumerate_configs
from .model import (
    EPS,
    AdmissionDecision,
    Embedding,
    PhysicalNetwork,
    ScenarioResult,
    SliceConfiguration,
    SliceRequest,
    apply_embedding,
    as_vector,
    objective_value,
)
from .pathing import bfs_tree, tree_path


def _score(net: PhysicalNetwork, i: int) -> float:
    return min(r / c for r, c in zip(net.node_rem[i], net.node_cap[i]))


def _fits(net: PhysicalNetwork, i: int, demand) -> bool:
    rem = net.node_rem[i]
    return all(rem[a] >= demand[a] - EPS for a in range(len(demand)))


def _largest(net: PhysicalNetwork, candidates) -> int | None:
    best, best_score = None, -1.0
    for i in candidates:
        sc = _score(net, i)
        if sc > best_score:
            best, best_score = i, sc
    return best


def map_config(net: PhysicalNetwork, s: SliceRequest, config: SliceConfiguration) -> Embedding | None:
    """Greedy embedding of one configuration, or ``None`` at the first VNF or link that does not fit.

    ``net`` is left untouched.
    """
    work = net.copy()
    order = config.order
    demands = [as_vector(s.demand(v), net.axes) for v in order]
    used = set()
    placed: list[int] = []
    paths: list[list[int]] = []

    first = _largest(work, (i for i in range(len(work.node_ids)) if _fits(work, i, demands[0])))
    if first is None:
        return None
    _debit_node(work, first, demands[0])
    used.add(first)
    placed.append(first)

    for depth in range(1, len(order)):
        prev = placed[-1]
        bw = s.link_demands[config.chain[depth - 1]]
        dist, parent = bfs_tree(work, prev, bw)
        rings: dict[int, list[int]] = {}
        for i, d in enumerate(dist):
            if d > 0 and i not in used and _fits(work, i, demands[depth]):
                rings.setdefault(d, []).append(i)
        if not rings:
            return None
        node = _largest(work, rings[min(rings)])
        links = tree_path(work, parent, prev, node)
        _debit_node(work, node, demands[depth])
        for l in links:
            work.link_rem[l] -= bw
        used.add(node)
        placed.append(node)
        paths.append(links)

    ids = net.node_ids
    node_map = {v: ids[i] for v, i in zip(order, placed)}
    link_paths = {
        vw: [(ids[net.link_ends[l][0]], ids[net.link_ends[l][1]]) for l in links]
        for vw, links in zip(config.chain, paths)
    }
    return Embedding(s.slice_id, config.config_id, node_map, link_paths)


def _debit_node(net: PhysicalNetwork, i: int, demand) -> None:
    rem = net.node_rem[i]
    for a in range(len(demand)):
        rem[a] -= demand[a]


def choose_config(candidates: list[tuple[SliceConfiguration, Embedding]], rng: random.Random):
    """Pick the mappable configuration with the fewest physical-link usages, random among ties."""
    fewest = min(emb.hops for _, emb in candidates)
    tied = [c for c in candidates if c[1].hops == fewest]
    if len(tied) == 1:
        return tied[0]
    return rng.choice(tied)


def solve_all(net: PhysicalNetwork, slices: Sequence[SliceRequest], seed: int = 0, gamma: float = 0.999) -> ScenarioResult:
    rng = random.Random(seed)
    work = net.copy()
    decisions = []
    counts: dict[str, int] = {}
    start = time.perf_counter()
    for s in slices:
        mappable = []
        for cfg in enumerate_configs(s):
            emb = map_config(work, s, cfg)
            if emb is not None:
                mappable.append((cfg, emb))
        if not mappable:
            decisions.append(AdmissionDecision(s.slice_id, False))
            continue
        cfg, emb = choose_config(mappable, rng)
        apply_embedding(work, s, emb)
        decisions.append(AdmissionDecision(s.slice_id, True, emb, cfg))
        label = f"k{cfg.config_id}"
        counts[label] = counts.get(label, 0) + 1
    elapsed = time.perf_counter() - start
    return ScenarioResult(decisions, objective_value(decisions, gamma), counts, elapsed)
