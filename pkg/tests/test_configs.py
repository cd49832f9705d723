import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from flexslice.configs import config_label, enumerate_configs, iter_configs, pin_to_config, virtual_links
from flexslice.errors import SpecificationError
from flexslice.harness import resolve_template
from flexslice.model import VNF, SliceRequest

from helpers import random_slice


def _check_invariants(s, cfg):
    n = len(s)
    assert sorted(cfg.positions.values()) == list(range(1, n + 1))
    assert set(cfg.positions) == set(s.vnf_ids)
    assert len(cfg.chain) == n - 1
    visited = [v for v, _ in cfg.chain] + ([cfg.chain[-1][1]] if cfg.chain else [])
    assert len(set(visited)) == len(visited)
    for v, w in cfg.chain:
        assert cfg.positions[w] - cfg.positions[v] == 1
    for v, p in s.fixed_positions.items():
        assert cfg.positions[v] == p


def test_video_template_has_two_orders():
    s = resolve_template("video")
    configs = enumerate_configs(s)
    assert [c.order for c in configs] == [
        ["IDPS", "VOC", "TM", "GW", "DU"],
        ["IDPS", "TM", "VOC", "GW", "DU"],
    ]
    links = virtual_links(s, configs[0])
    assert [(v, w) for v, w, _ in links] == [("IDPS", "VOC"), ("VOC", "TM"), ("TM", "GW"), ("GW", "DU")]


def test_all_fixed_gives_declared_order():
    s = SliceRequest(
        "s", [VNF(v, {"compute": 1}) for v in "abc"], {("c", "a"): 1, ("a", "b"): 2}, {"c": 1, "a": 2, "b": 3}
    )
    (cfg,) = enumerate_configs(s)
    assert cfg.order == ["c", "a", "b"]


def test_three_flexible_two_fixed():
    rng = random.Random(5)
    s = random_slice(rng, "s", 5, n_fixed=2)
    configs = enumerate_configs(s)
    assert len(configs) == 6
    assert len({tuple(c.order) for c in configs}) == 6
    for cfg in configs:
        _check_invariants(s, cfg)


def test_swapped_pair_looks_up_each_ordered_demand():
    s = SliceRequest(
        "s",
        [VNF(v, {"compute": 1}) for v in "abc"],
        {("a", "b"): 1, ("b", "c"): 2, ("a", "c"): 3, ("c", "b"): 4},
        {"a": 1},
    )
    table = {tuple(c.order): virtual_links(s, c) for c in enumerate_configs(s)}
    assert table == {
        ("a", "b", "c"): [("a", "b", 1), ("b", "c", 2)],
        ("a", "c", "b"): [("a", "c", 3), ("c", "b", 4)],
    }


def test_single_vnf_has_no_links():
    s = SliceRequest("s", [VNF("a", {"compute": 1})], {})
    (cfg,) = enumerate_configs(s)
    assert virtual_links(s, cfg) == []


def test_missing_demand_names_the_pair():
    s = SliceRequest("s", [VNF(v, {"compute": 1}) for v in "ab"], {("a", "b"): 1})
    with pytest.raises(SpecificationError, match=r"\('b', 'a'\)"):
        enumerate_configs(s)


def test_iterator_is_lazy():
    s = SliceRequest("s", [VNF(f"v{k}", {"compute": 1}) for k in range(10)],
                     {(f"v{a}", f"v{b}"): 1 for a in range(10) for b in range(10) if a != b})
    first = list(itertools.islice(iter_configs(s), 3))
    assert [c.config_id for c in first] == [1, 2, 3]


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_enumeration_properties(seed, n):
    rng = random.Random(seed)
    s = random_slice(rng, "s", n)
    configs = enumerate_configs(s)
    assert len(configs) == math.factorial(len(s.flexible))
    assert len({tuple(c.order) for c in configs}) == len(configs)
    assert [c.config_id for c in configs] == list(range(1, len(configs) + 1))
    # exhaustive oracle: all permutations honoring the pins
    expected = [
        p for p in itertools.permutations(s.vnf_ids)
        if all(p[pos - 1] == v for v, pos in s.fixed_positions.items())
    ]
    assert sorted(tuple(c.order) for c in configs) == sorted(expected)
    for cfg in configs:
        _check_invariants(s, cfg)


@given(st.integers(0, 10**6), st.integers(1, 5))
def test_pinning_keeps_one_config(seed, n):
    s = random_slice(random.Random(seed), "s", n)
    for cfg in enumerate_configs(s):
        pinned = pin_to_config(s, cfg)
        (only,) = enumerate_configs(pinned)
        assert only.positions == cfg.positions
        assert config_label(s, only.positions) == f"k{cfg.config_id}"
