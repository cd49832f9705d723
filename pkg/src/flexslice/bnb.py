"""Depth-first branch-and-bound embedding with an A*-style cost (BnB*).

Each slice is embedded on its own, in arrival order.  For every admissible
configuration the search assigns the chain's VNFs to physical nodes one
position at a time, links consecutive VNFs by a minimum-hop feasible path and
scores the partial solution with ``g + h``:

* ``g`` is the normalized resource usage of the partial embedding, measured
  against the capacities available when the slice arrived;
* ``h`` is the normalized standard deviation of the remaining node and link
  capacities after the partial mapping (a load-balance estimate).

A branch is cut as soon as ``g + h`` reaches the cost of the best complete
solution found so far.  ``h`` is not a lower bound, so the search is a
heuristic unless ``heuristic=False``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

from .configs import enumerate_configs
from .errors import ParameterError, SpecificationError
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

COST_TOL = 1e-9


def _pstdev(values: Sequence[float]) -> float:
    n = len(values)
    if n == 0:
        return 0.0
    mean = math.fsum(values) / n
    return math.sqrt(math.fsum((x - mean) ** 2 for x in values) / n)


def actual_cost(net0: PhysicalNetwork, partial: Embedding, s: SliceRequest, rho1: float = 0.5, rho2: float = 0.5) -> float:
    """Normalized node and link usage of a (partial) embedding.

    Denominators are the remaining capacities of ``net0``, the network as it
    was when the slice arrived.  With several node axes the per-axis ratios
    are averaged.
    """
    node_terms = []
    for v, node in partial.node_map.items():
        avail = net0.node_remaining(node)
        demand = as_vector(s.demand(v), net0.axes)
        ratios = []
        for axis, r in zip(net0.axes, demand):
            if r == 0:
                ratios.append(0.0)
                continue
            if avail[axis] <= 0:
                raise SpecificationError(f"node {node!r} has no {axis} available to normalize by")
            ratios.append(r / avail[axis])
        node_terms.append(math.fsum(ratios) / len(ratios))
    link_terms = []
    for vw, path in partial.link_paths.items():
        bw = s.link_demands[tuple(vw)]
        for link in path:
            avail = net0.link_remaining(tuple(link))
            if avail <= 0:
                raise SpecificationError(f"link {tuple(link)!r} has no bandwidth available to normalize by")
            link_terms.append(bw / avail)
    return rho1 * math.fsum(node_terms) + rho2 * math.fsum(link_terms)


def estimated_cost(net: PhysicalNetwork, rho1: float = 0.5, rho2: float = 0.5) -> float:
    """Load-balance estimate: population std of remaining capacities over total capacity."""
    node_part = 0.0
    if net.node_ids:
        per_axis = []
        for a in range(len(net.axes)):
            total = math.fsum(c[a] for c in net.node_cap)
            per_axis.append(_pstdev([r[a] for r in net.node_rem]) / total)
        node_part = math.fsum(per_axis) / len(per_axis)
    link_part = 0.0
    if net.link_ends:
        link_part = _pstdev(net.link_rem) / math.fsum(net.link_cap)
    return rho1 * node_part + rho2 * link_part


@dataclass
class SliceSolution:
    config: SliceConfiguration
    embedding: Embedding
    cost: float


@dataclass
class SearchStats:
    expanded: int = 0
    complete: int = 0


class _SliceSearch:
    """Working state for one slice: a private copy of the network mutated with undo."""

    def __init__(self, net: PhysicalNetwork, rho1: float, rho2: float, heuristic: bool):
        self.net = net.copy()
        self.rho1, self.rho2 = rho1, rho2
        self.heuristic = heuristic
        n_axes = len(net.axes)
        self.n_axes = n_axes
        self.arrival_node = [tuple(r) for r in net.node_rem]
        self.arrival_link = list(net.link_rem)
        self.used = [False] * len(net.node_ids)

        # shifted sums keep the variance update accurate when capacities are near uniform
        n_nodes = len(net.node_ids)
        self.node_n = n_nodes
        self.node_mu, self.node_s0, self.node_q0, self.node_total = [], [], [], []
        for a in range(n_axes):
            vals = [r[a] for r in self.arrival_node]
            mu = math.fsum(vals) / n_nodes if n_nodes else 0.0
            self.node_mu.append(mu)
            self.node_s0.append(math.fsum(x - mu for x in vals))
            self.node_q0.append(math.fsum((x - mu) ** 2 for x in vals))
            self.node_total.append(math.fsum(c[a] for c in net.node_cap))
        n_links = len(net.link_ends)
        self.link_n = n_links
        self.link_mu = math.fsum(self.arrival_link) / n_links if n_links else 0.0
        self.link_s0 = math.fsum(x - self.link_mu for x in self.arrival_link)
        self.link_q0 = math.fsum((x - self.link_mu) ** 2 for x in self.arrival_link)
        self.link_total = math.fsum(net.link_cap)

        self.node_debit: dict[int, tuple[float, ...]] = {}
        self.link_debit: dict[int, float] = {}
        self.stats = SearchStats()

    # cost pieces --------------------------------------------------------
    def node_cost(self, i: int, demand: tuple[float, ...]) -> float:
        avail = self.arrival_node[i]
        total = 0.0
        for a in range(self.n_axes):
            if demand[a]:
                total += demand[a] / avail[a]
        return self.rho1 * total / self.n_axes

    def link_cost(self, links: list[int], bw: float) -> float:
        avail = self.arrival_link
        return self.rho2 * math.fsum(bw / avail[l] for l in links)

    def h(self) -> float:
        if not self.heuristic:
            return 0.0
        node_part = 0.0
        if self.node_n:
            acc = 0.0
            for a in range(self.n_axes):
                mu = self.node_mu[a]
                s, q = self.node_s0[a], self.node_q0[a]
                for i, d in self.node_debit.items():
                    r0 = self.arrival_node[i][a] - mu
                    s -= d[a]
                    q += (r0 - d[a]) ** 2 - r0 * r0
                m = s / self.node_n
                acc += math.sqrt(max(0.0, q / self.node_n - m * m)) / self.node_total[a]
            node_part = acc / self.n_axes
        link_part = 0.0
        if self.link_n:
            mu = self.link_mu
            s, q = self.link_s0, self.link_q0
            for l, d in self.link_debit.items():
                r0 = self.arrival_link[l] - mu
                s -= d
                q += (r0 - d) ** 2 - r0 * r0
            m = s / self.link_n
            link_part = math.sqrt(max(0.0, q / self.link_n - m * m)) / self.link_total
        return self.rho1 * node_part + self.rho2 * link_part

    # state changes ------------------------------------------------------
    def place(self, i: int, demand: tuple[float, ...], links: list[int], bw: float) -> None:
        self.used[i] = True
        rem = self.net.node_rem[i]
        for a in range(self.n_axes):
            rem[a] -= demand[a]
        self.node_debit[i] = demand
        link_rem = self.net.link_rem
        for l in links:
            link_rem[l] -= bw
            self.link_debit[l] = self.link_debit.get(l, 0.0) + bw

    def unplace(self, i: int, demand: tuple[float, ...], links: list[int], bw: float) -> None:
        self.used[i] = False
        rem = self.net.node_rem[i]
        arrival = self.arrival_node[i]
        for a in range(self.n_axes):
            rem[a] = arrival[a]
        del self.node_debit[i]
        link_rem = self.net.link_rem
        for l in links:
            d = self.link_debit[l] - bw
            if d <= EPS:
                del self.link_debit[l]
                link_rem[l] = self.arrival_link[l]
            else:
                self.link_debit[l] = d
                link_rem[l] = self.arrival_link[l] - d


class BnBStar:
    """Per-slice solver.

    ``beta`` caps the number of complete solutions accepted per configuration
    (``None`` means unlimited).  With ``share_incumbent`` the best cost found in
    earlier configurations bounds the search of later ones.
    """

    def __init__(
        self,
        beta: int | None = None,
        rho1: float = 0.5,
        rho2: float = 0.5,
        heuristic: bool = True,
        share_incumbent: bool = True,
    ):
        if beta is not None and beta < 1:
            raise ParameterError(f"beta must be >= 1 or None, got {beta}")
        self.beta = beta
        self.rho1, self.rho2 = rho1, rho2
        self.heuristic = heuristic
        self.share_incumbent = share_incumbent
        self.stats = SearchStats()

    def solve_slice(self, net: PhysicalNetwork, s: SliceRequest, configs: list[SliceConfiguration] | None = None) -> SliceSolution | None:
        configs = enumerate_configs(s) if configs is None else configs
        search = _SliceSearch(net, self.rho1, self.rho2, self.heuristic)
        beta = math.inf if self.beta is None else self.beta
        axes = net.axes
        best: SliceSolution | None = None
        best_cost = math.inf

        for cfg in configs:
            order = cfg.order
            demands = [as_vector(s.demand(v), axes) for v in order]
            bws = [s.link_demands[vw] for vw in cfg.chain]
            n = len(order)
            # floor[d]: least g that positions d.. can still add (cheapest node, one hop on the widest link)
            widest = max(search.arrival_link, default=0.0)
            floor = [0.0] * (n + 1)
            for d in range(n - 1, -1, -1):
                fits = [
                    i for i, rem in enumerate(search.arrival_node)
                    if all(rem[a] >= demands[d][a] - EPS for a in range(search.n_axes))
                ]
                cheapest = min((search.node_cost(i, demands[d]) for i in fits), default=math.inf)
                hop = self.rho2 * bws[d - 1] / widest if d > 0 and widest > 0 else 0.0
                floor[d] = floor[d + 1] + cheapest + hop
            bound = best_cost if self.share_incumbent else math.inf
            found: list = []  # [cost, assignment, paths] of this configuration's incumbent
            assign: list[int] = []
            paths: list[list[int]] = []
            n_sol = 0

            def dfs(depth: int, prev: int, g: float) -> None:
                nonlocal bound, n_sol
                search.stats.expanded += 1
                demand = demands[depth]
                if depth > 0:
                    bw = bws[depth - 1]
                    dist, parent = bfs_tree(search.net, prev, bw)
                else:
                    bw = 0.0
                node_rem = search.net.node_rem
                used = search.used
                for i in range(len(used)):
                    if n_sol >= beta:
                        return
                    if used[i]:
                        continue
                    rem = node_rem[i]
                    if any(rem[a] < demand[a] - EPS for a in range(len(demand))):
                        continue
                    if depth > 0:
                        if dist[i] < 0:
                            continue
                        links = tree_path(search.net, parent, prev, i)
                    else:
                        links = []
                    g_new = g + search.node_cost(i, demand)
                    if links:
                        g_new += search.link_cost(links, bw)
                    if g_new + floor[depth + 1] >= bound:
                        # h >= 0, so no completion of this branch can beat the incumbent
                        continue
                    search.place(i, demand, links, bw)
                    cost = g_new + search.h()
                    if cost < bound - COST_TOL:
                        assign.append(i)
                        paths.append(links)
                        if depth + 1 == n:
                            n_sol += 1
                            search.stats.complete += 1
                            bound = cost
                            found[:] = [cost, list(assign), [list(p) for p in paths]]
                        else:
                            dfs(depth + 1, i, g_new)
                        assign.pop()
                        paths.pop()
                    search.unplace(i, demand, links, bw)

            dfs(0, -1, 0.0)
            if found and found[0] < best_cost - COST_TOL:
                best_cost = found[0]
                best = SliceSolution(cfg, self._embedding(net, s, cfg, found[1], found[2]), found[0])

        self.stats.expanded += search.stats.expanded
        self.stats.complete += search.stats.complete
        return best

    @staticmethod
    def _embedding(net, s, cfg, assign, paths) -> Embedding:
        ids = net.node_ids
        order = cfg.order
        node_map = {v: ids[i] for v, i in zip(order, assign)}
        link_paths = {}
        for vw, links in zip(cfg.chain, paths[1:]):
            link_paths[vw] = [(ids[net.link_ends[l][0]], ids[net.link_ends[l][1]]) for l in links]
        return Embedding(s.slice_id, cfg.config_id, node_map, link_paths)


def solve_slice(
    net: PhysicalNetwork,
    s: SliceRequest,
    beta: int | None = None,
    rho1: float = 0.5,
    rho2: float = 0.5,
    heuristic: bool = True,
) -> SliceSolution | None:
    return BnBStar(beta, rho1, rho2, heuristic).solve_slice(net, s)


def solve_all(
    net: PhysicalNetwork,
    slices: Sequence[SliceRequest],
    beta: int | None = None,
    rho1: float = 0.5,
    rho2: float = 0.5,
    gamma: float = 0.999,
    solver: BnBStar | None = None,
) -> ScenarioResult:
    """Embed ``slices`` one after another on a copy of ``net``."""
    solver = solver or BnBStar(beta, rho1, rho2)
    work = net.copy()
    decisions = []
    counts: dict[str, int] = {}
    start = time.perf_counter()
    for s in slices:
        sol = solver.solve_slice(work, s)
        if sol is None:
            decisions.append(AdmissionDecision(s.slice_id, False))
            continue
        apply_embedding(work, s, sol.embedding)
        decisions.append(AdmissionDecision(s.slice_id, True, sol.embedding, sol.config))
        label = f"k{sol.config.config_id}"
        counts[label] = counts.get(label, 0) + 1
    elapsed = time.perf_counter() - start
    return ScenarioResult(decisions, objective_value(decisions, gamma), counts, elapsed)
