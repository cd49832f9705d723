"""Seeded instance generators shared by the test modules."""
from __future__ import annotations

import random

from flexslice.model import VNF, PhysicalNetwork, SliceRequest

AXES = ("compute", "storage")


def random_network(rng: random.Random, n_nodes: int, axes=AXES, extra_edges: int | None = None,
                   node_caps=(2, 4, 6, 8), link_caps=(4, 8, 12, 20)) -> PhysicalNetwork:
    """Connected network: a random spanning tree plus a few extra edges."""
    net = PhysicalNetwork(axes=axes)
    for i in range(n_nodes):
        net.add_node(f"n{i}", {a: rng.choice(node_caps) for a in axes})
    for i in range(1, n_nodes):
        net.add_edge(f"n{i}", f"n{rng.randrange(i)}", rng.choice(link_caps))
    if extra_edges is None:
        extra_edges = rng.randint(0, n_nodes)
    for _ in range(extra_edges):
        if n_nodes < 2:
            break
        a, b = rng.sample(range(n_nodes), 2)
        if not net.has_link((f"n{a}", f"n{b}")):
            net.add_edge(f"n{a}", f"n{b}", rng.choice(link_caps))
    return net


def random_slice(rng: random.Random, slice_id: str, n_vnfs: int, axes=AXES, max_demand: int = 3,
                 max_bw: int = 6, n_fixed: int | None = None) -> SliceRequest:
    """Slice with demands for every ordered VNF pair, so any configuration is admissible."""
    ids = [f"v{k}" for k in range(n_vnfs)]
    vnfs = [VNF(v, {a: float(rng.randint(1, max_demand)) for a in axes}) for v in ids]
    if n_fixed is None:
        n_fixed = rng.randint(0, n_vnfs)
    pinned = rng.sample(ids, n_fixed)
    slots = rng.sample(range(1, n_vnfs + 1), n_fixed)
    links = {(v, w): float(rng.randint(1, max_bw)) for v in ids for w in ids if v != w}
    return SliceRequest(slice_id, vnfs, links, dict(zip(pinned, slots)))


def random_instance(seed: int, max_nodes: int = 6, max_slices: int = 3, max_vnfs: int = 3, min_vnfs: int = 1):
    rng = random.Random(seed)
    net = random_network(rng, rng.randint(max(2, max_vnfs), max_nodes))
    slices = [random_slice(rng, f"s{k + 1}", rng.randint(min_vnfs, max_vnfs)) for k in range(rng.randint(1, max_slices))]
    return net, slices


def line_network(names, bandwidth=10.0, capacity=None, axes=("compute",)) -> PhysicalNetwork:
    net = PhysicalNetwork(axes=axes)
    for name in names:
        net.add_node(name, capacity or {a: 8.0 for a in axes})
    for a, b in zip(names, names[1:]):
        net.add_edge(a, b, bandwidth)
    return net


def chain_slice(slice_id, demands, bandwidths, fixed=None, axes=("compute",)) -> SliceRequest:
    """Slice v0 -> v1 -> ... with every VNF pinned in order unless ``fixed`` says otherwise."""
    ids = [f"v{k}" for k in range(len(demands))]
    vnfs = [VNF(v, {a: float(d) for a in axes}) for v, d in zip(ids, demands)]
    links = {(ids[k], ids[k + 1]): float(bw) for k, bw in enumerate(bandwidths)}
    if fixed is None:
        fixed = {v: k + 1 for k, v in enumerate(ids)}
    return SliceRequest(slice_id, vnfs, links, fixed)
