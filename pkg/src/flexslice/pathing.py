"""Minimum-hop paths over links with enough remaining bandwidth.

Links whose remaining bandwidth is below the demand are invisible to the
search.  Among equal-hop paths the one whose link sequence is
lexicographically smallest (in network node order) wins: a breadth-first
search that scans successors in ascending order discovers every node through
its lexicographically smallest shortest path.
"""
from __future__ import annotations

from collections import deque

from .errors import ParameterError
from .model import EPS, PhysicalNetwork


def bfs_tree(net: PhysicalNetwork, src: int, demand: float) -> tuple[list[int], list[int]]:
    """Index-level search from node index ``src``.

    Returns ``(dist, parent_link)``; unreachable nodes have ``dist == -1``.
    """
    n = len(net.node_ids)
    dist = [-1] * n
    parent = [-1] * n
    dist[src] = 0
    rem = net.link_rem
    adj = net.out_adj
    threshold = demand - EPS
    queue = deque([src])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v, l in adj[u]:
            if dist[v] < 0 and rem[l] >= threshold:
                dist[v] = du
                parent[v] = l
                queue.append(v)
    return dist, parent


def tree_path(net: PhysicalNetwork, parent: list[int], src: int, dst: int) -> list[int] | None:
    """Link indices from ``src`` to ``dst`` along a :func:`bfs_tree` result."""
    if dst == src:
        return []
    if parent[dst] < 0:
        return None
    links = []
    node = dst
    ends = net.link_ends
    while node != src:
        l = parent[node]
        links.append(l)
        node = ends[l][0]
    links.reverse()
    return links


def shortest_path(net: PhysicalNetwork, src, dst, demand: float) -> list[tuple] | None:
    """Minimum-hop directed path ``src -> dst`` as link ids, or ``None`` if none is feasible."""
    for node in (src, dst):
        if node not in net.node_index:
            raise ParameterError(f"unknown node {node!r}")
    s, t = net.node_index[src], net.node_index[dst]
    if s == t:
        return []
    _, parent = bfs_tree(net, s, demand)
    path = tree_path(net, parent, s, t)
    if path is None:
        return None
    ids = net.node_ids
    return [(ids[net.link_ends[l][0]], ids[net.link_ends[l][1]]) for l in path]


def hop_distances(net: PhysicalNetwork, src, demand: float = 0.0) -> dict:
    """Hop distance from ``src`` to every reachable node."""
    if src not in net.node_index:
        raise ParameterError(f"unknown node {src!r}")
    dist, _ = bfs_tree(net, net.node_index[src], demand)
    return {net.node_ids[i]: d for i, d in enumerate(dist) if d >= 0}
