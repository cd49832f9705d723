"""Enumeration of admissible VNF orders for a slice."""
from __future__ import annotations

import itertools
from typing import Iterator

from .errors import SpecificationError
from .model import SliceConfiguration, SliceRequest


def iter_configs(s: SliceRequest) -> Iterator[SliceConfiguration]:
    """Yield every configuration of ``s`` lazily.

    Fixed VNFs keep their positions; flexible VNFs are permuted over the free
    positions.  Permutations come out in lexicographic order of the flexible
    VNFs' declaration order, and config ids count up from 1.
    """
    n = len(s)
    taken = set(s.fixed_positions.values())
    free = [p for p in range(1, n + 1) if p not in taken]
    flexible = s.flexible
    for k, perm in enumerate(itertools.permutations(flexible), start=1):
        positions = dict(s.fixed_positions)
        positions.update(zip(perm, free))
        order = sorted(positions, key=positions.__getitem__)
        chain = list(zip(order, order[1:]))
        for vw in chain:
            if vw not in s.link_demands:
                raise SpecificationError(
                    f"slice {s.slice_id!r}: configuration {' -> '.join(order)} needs a bandwidth demand for {vw}"
                )
        yield SliceConfiguration(s.slice_id, k, positions, chain)


def enumerate_configs(s: SliceRequest) -> list[SliceConfiguration]:
    return list(iter_configs(s))


def virtual_links(s: SliceRequest, config: SliceConfiguration) -> list[tuple[str, str, float]]:
    return [(v, w, s.link_demands[(v, w)]) for v, w in config.chain]


def pin_to_config(s: SliceRequest, config: SliceConfiguration) -> SliceRequest:
    """Copy of ``s`` with every VNF pinned to its position in ``config``."""
    return SliceRequest(
        slice_id=s.slice_id,
        vnfs=list(s.vnfs),
        link_demands=dict(s.link_demands),
        fixed_positions=dict(config.positions),
    )


def config_label(s: SliceRequest, positions: dict[str, int]) -> str:
    """Name of the configuration of ``s`` with these positions, ``k1``, ``k2``, ..."""
    for cfg in iter_configs(s):
        if cfg.positions == positions:
            return f"k{cfg.config_id}"
    raise SpecificationError(f"positions {positions} are not admissible for slice {s.slice_id!r}")
