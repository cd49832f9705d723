import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from flexslice.errors import ParameterError
from flexslice.pathing import hop_distances, shortest_path

from helpers import line_network, random_network


def _filtered(net, demand):
    g = nx.DiGraph()
    g.add_nodes_from(net.node_ids)
    for l, (i, j) in enumerate(net.link_ends):
        if net.link_rem[l] >= demand:
            g.add_edge(net.node_ids[i], net.node_ids[j])
    return g


def _random_state(seed, n_nodes=8):
    rng = random.Random(seed)
    net = random_network(rng, n_nodes, extra_edges=rng.randint(0, 2 * n_nodes))
    for l in range(len(net.link_ends)):
        net.link_rem[l] = float(rng.randint(0, int(net.link_cap[l])))
    return rng, net


def test_same_node():
    assert shortest_path(line_network(["a", "b"]), "a", "a", 100) == []


def test_line():
    net = line_network(["A", "B", "C", "D"])
    assert shortest_path(net, "A", "D", 5) == [("A", "B"), ("B", "C"), ("C", "D")]


def test_capacity_filter_blocks():
    net = line_network(["A", "B", "C"], bandwidth=10)
    net.set_link_remaining(("B", "C"), 4)
    assert shortest_path(net, "A", "C", 5) is None
    assert shortest_path(net, "C", "A", 5) == [("C", "B"), ("B", "A")]


def test_unknown_node():
    with pytest.raises(ParameterError):
        shortest_path(line_network(["a"]), "a", "zz", 1)


def test_ties_take_smallest_node_sequence():
    net = line_network(["s", "x", "y", "t"])
    # two 2-hop routes s-x-t and s-y-t; x precedes y in node order
    net.add_edge("s", "y", 10)
    net.add_edge("x", "t", 10)
    assert shortest_path(net, "s", "t", 1) == [("s", "x"), ("x", "t")]


@pytest.mark.parametrize("seed", range(200))
def test_hops_match_bfs_oracle(seed):
    rng, net = _random_state(seed)
    demand = rng.randint(1, 12)
    g = _filtered(net, demand)
    oracle = {u: nx.single_source_shortest_path_length(g, u) for u in net.node_ids}
    for u in net.node_ids:
        for v in net.node_ids:
            path = shortest_path(net, u, v, demand)
            if v in oracle[u]:
                assert path is not None and len(path) == oracle[u][v]
            else:
                assert path is None


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8))
def test_path_properties(seed, n):
    rng, net = _random_state(seed, n)
    demand = rng.randint(1, 12)
    g = _filtered(net, demand)
    index = net.node_index
    for u in net.node_ids:
        for v in net.node_ids:
            path = shortest_path(net, u, v, demand)
            if path is None or u == v:
                continue
            nodes = [u] + [b for _, b in path]
            assert nodes[-1] == v
            assert all(a == prev for (a, _), prev in zip(path, nodes))
            assert len(set(nodes)) == len(nodes)
            assert all(net.link_remaining(link) >= demand for link in path)
            # exhaustive: no simple path is shorter, and ours is the smallest node sequence among the shortest
            candidates = [p for p in nx.all_simple_paths(g, u, v) if len(p) == len(nodes)]
            assert min(len(p) for p in nx.all_simple_paths(g, u, v)) == len(nodes)
            assert min(candidates, key=lambda p: [index[x] for x in p]) == nodes
            assert shortest_path(net, u, v, demand) == path


def test_hop_distances():
    net = line_network(["a", "b", "c"])
    assert hop_distances(net, "a", 1) == {"a": 0, "b": 1, "c": 2}
