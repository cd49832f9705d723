import random

from hypothesis import given, settings, strategies as st

from flexslice.bfn import choose_config, map_config, solve_all
from flexslice.configs import enumerate_configs, pin_to_config
from flexslice.model import VNF, Embedding, PhysicalNetwork, SliceRequest, validate_embedding

from helpers import chain_slice, line_network, random_instance, random_network, random_slice


def _line(remaining, capacity=8.0):
    names = "abcd"[: len(remaining)]
    net = PhysicalNetwork()
    for n, r in zip(names, remaining):
        net.add_node(n, capacity, remaining=r)
    for x, y in zip(names, names[1:]):
        net.add_edge(x, y, 10)
    return net


def test_first_vnf_takes_largest():
    net = PhysicalNetwork()
    for n, r in zip("xyz", (3, 7, 5)):
        net.add_node(n, 10, remaining=r)
    s = chain_slice("s", [2], [])
    emb = map_config(net, s, enumerate_configs(s)[0])
    assert emb.node_map == {"v0": "y"}


def test_first_vnf_too_big():
    net = _line([4, 4])
    s = chain_slice("s", [5, 1], [1])
    assert map_config(net, s, enumerate_configs(s)[0]) is None


def test_chain_trace_nearest_ring():
    # scores a 0.5, b 1.0, c 0.75, d 1.0: v0 -> b (first of the tie), v1 -> c (best neighbour of b),
    # v2 -> d (only free neighbour of c)
    net = _line([4, 8, 6, 8])
    s = chain_slice("s", [2, 2, 2], [1, 1])
    emb = map_config(net, s, enumerate_configs(s)[0])
    assert emb.node_map == {"v0": "b", "v1": "c", "v2": "d"}
    assert emb.link_paths == {("v0", "v1"): [("b", "c")], ("v1", "v2"): [("c", "d")]}
    cfg = enumerate_configs(s)[0]
    from flexslice.model import AdmissionDecision

    assert validate_embedding(net, [(s, AdmissionDecision("s", True, emb, cfg))]).ok
    assert net.node_rem == [[4.0], [8.0], [6.0], [8.0]]


def test_chain_trace_expands_ring():
    # d cannot host v2, so the search widens to distance 2 from c and lands on a via b
    net = _line([4, 8, 6, 1])
    s = chain_slice("s", [2, 2, 2], [1, 1])
    emb = map_config(net, s, enumerate_configs(s)[0])
    assert emb.node_map == {"v0": "b", "v1": "c", "v2": "a"}
    assert emb.link_paths[("v1", "v2")] == [("c", "b"), ("b", "a")]


def test_greedy_does_not_revisit_first_choice():
    # v0 lands on a, whose only link is too thin; no backtracking, so the config fails
    net = _line([8, 8, 8, 8])
    net.set_link_remaining(("a", "b"), 0.5)
    s = chain_slice("s", [1, 1], [1])
    assert map_config(net, s, enumerate_configs(s)[0]) is None


def test_distance_counts_only_usable_links():
    # b scores higher than c, but the a->b link is too thin, so b sits two hops away via c
    net = PhysicalNetwork()
    net.add_node("a", 8)
    net.add_node("b", 8, remaining=7)
    net.add_node("c", 8, remaining=5)
    net.add_edge("a", "b", 10)
    net.add_edge("a", "c", 10)
    net.add_edge("c", "b", 10)
    s = chain_slice("s", [1, 1], [2])
    cfg = enumerate_configs(s)[0]
    assert map_config(net, s, cfg).node_map == {"v0": "a", "v1": "b"}
    net.set_link_remaining(("a", "b"), 1)
    emb = map_config(net, s, cfg)
    assert emb.node_map == {"v0": "a", "v1": "c"}


def _candidate(config_id, hops):
    s = chain_slice("s", [1, 1], [1])
    cfg = type(enumerate_configs(s)[0])("s", config_id, {"v0": 1, "v1": 2}, [("v0", "v1")])
    return cfg, Embedding("s", config_id, {"v0": "a", "v1": "b"}, {("v0", "v1"): [("a", "b")] * hops})


def test_fewest_hops_wins():
    cands = [_candidate(1, 5), _candidate(2, 3)]
    for seed in range(20):
        assert choose_config(cands, random.Random(seed))[0].config_id == 2


def test_ties_are_fair():
    net = line_network(["a", "b"])
    s = SliceRequest("s", [VNF("p", {"compute": 1}), VNF("q", {"compute": 1})], {("p", "q"): 1, ("q", "p"): 1})
    assert len(enumerate_configs(s)) == 2
    picks = [solve_all(net, [s], seed=seed).decisions[0].config.config_id for seed in range(1000)]
    assert abs(picks.count(1) / 1000 - 0.5) <= 0.05


def test_unmappable_slice_is_rejected_and_run_continues():
    net = line_network(["a", "b"], capacity={"compute": 2.0})
    big = chain_slice("big", [3, 1], [1])
    small = chain_slice("small", [1, 1], [1])
    result = solve_all(net, [big, small])
    assert [d.accepted for d in result.decisions] == [False, True]
    assert result.per_config_counts == {"k1": 1}


@settings(max_examples=80)
@given(st.integers(0, 10**6), st.integers(0, 1000))
def test_seeded_runs_repeat(seed, rng_seed):
    net, slices = random_instance(seed, max_nodes=6, max_slices=3)
    a = solve_all(net, slices, seed=rng_seed)
    b = solve_all(net, slices, seed=rng_seed)
    assert [(d.accepted, d.embedding) for d in a.decisions] == [(d.accepted, d.embedding) for d in b.decisions]
    assert validate_embedding(net, list(zip(slices, a.decisions))).ok


@settings(max_examples=150)
@given(st.integers(0, 10**6))
def test_flexible_acceptance_dominates(seed):
    rng = random.Random(seed)
    net = random_network(rng, rng.randint(3, 7))
    for i in range(len(net.node_ids)):
        net.node_rem[i] = [c * rng.uniform(0.2, 1) for c in net.node_cap[i]]
    s = random_slice(rng, "s", rng.randint(2, 4))
    flex = solve_all(net, [s], seed=seed).decisions[0].accepted
    for cfg in enumerate_configs(s):
        if solve_all(net, [pin_to_config(s, cfg)], seed=seed).decisions[0].accepted:
            assert flex


def test_map_config_leaves_network_alone():
    net = _line([8, 8, 8])
    before = net.copy()
    s = chain_slice("s", [1, 1, 1], [2, 2])
    map_config(net, s, enumerate_configs(s)[0])
    assert net == before
