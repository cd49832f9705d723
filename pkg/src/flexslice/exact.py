"""Exact reference machinery.

``brute_force`` enumerates admission decisions, configurations, injective
placements and simple paths for tiny instances.  ``export_lp`` writes the
linearized joint model in CPLEX LP syntax so any MILP solver can take it, and
``import_solution`` turns a solver's variable assignment back into decisions.
"""
from __future__ import annotations

import itertools
import math
import re
from typing import Sequence

from .configs import enumerate_configs
from .errors import ParseError, SizeError
from .model import (
    EPS,
    AdmissionDecision,
    Embedding,
    PhysicalNetwork,
    SliceConfiguration,
    SliceRequest,
    as_vector,
    objective_value,
)

DEFAULT_MAX_SPACE = 10**7


def simple_paths(net: PhysicalNetwork, max_hops: int) -> dict[tuple[int, int], list[list[int]]]:
    """All simple directed paths (as link-index lists) up to ``max_hops``, shortest first."""
    out: dict[tuple[int, int], list[list[int]]] = {}
    n = len(net.node_ids)
    for src in range(n):
        stack = [(src, [], {src})]
        while stack:
            node, links, seen = stack.pop()
            if links:
                out.setdefault((src, node), []).append(links)
            if len(links) == max_hops:
                continue
            for nxt, l in reversed(net.out_adj[node]):
                if nxt not in seen:
                    stack.append((nxt, links + [l], seen | {nxt}))
    for paths in out.values():
        paths.sort(key=lambda p: (len(p), p))
    return out


def brute_force(
    net: PhysicalNetwork,
    slices: Sequence[SliceRequest],
    gamma: float = 0.999,
    max_space: int = DEFAULT_MAX_SPACE,
    max_hops: int | None = None,
) -> tuple[list[AdmissionDecision], float]:
    """Jointly optimal admission, ordering and embedding of ``slices`` on ``net``.

    Capacities are the network's remaining ones.  The search only skips
    subtrees that provably cannot beat the incumbent, so the first optimum in
    enumeration order (accept before reject, configurations in id order,
    placements in node order, shorter paths first) is returned.
    """
    objective_value([], gamma)  # validates gamma
    n_nodes = len(net.node_ids)
    space = 1
    for s in slices:
        space *= n_nodes ** len(s)
    if space > max_space:
        raise SizeError(f"placement space {space:.3g} exceeds the guard {max_space:.3g} by a factor {space / max_space:.3g}")
    max_hops = n_nodes - 1 if max_hops is None else max_hops
    paths = simple_paths(net, max_hops)
    axes = net.axes
    node_rem = [list(r) for r in net.node_rem]
    link_rem = list(net.link_rem)

    prepared = []
    for s in slices:
        cfgs = []
        for cfg in enumerate_configs(s):
            order = cfg.order
            cfgs.append((cfg, [as_vector(s.demand(v), axes) for v in order], [s.link_demands[vw] for vw in cfg.chain]))
        prepared.append((s, cfgs))
    penalty = 1.0 - gamma
    # best contribution any single slice can still make
    optimistic = [max(0.0, gamma - penalty * (len(s) - 1)) for s in slices]
    tail = [math.fsum(optimistic[k:]) for k in range(len(slices) + 1)]

    best_value = -math.inf
    best_plan = None
    plan: list = [None] * len(slices)

    def fits(i, demand):
        rem = node_rem[i]
        return all(rem[a] >= demand[a] - EPS for a in range(len(demand)))

    def slice_level(k: int, value: float) -> None:
        nonlocal best_value, best_plan
        if value + tail[k] <= best_value + EPS:
            return
        if k == len(slices):
            best_value = value
            best_plan = list(plan)
            return
        s, cfgs = prepared[k]
        n = len(s)
        for cfg, demands, bws in cfgs:
            for placement in itertools.permutations(range(n_nodes), n):
                if not all(fits(i, d) for i, d in zip(placement, demands)):
                    continue
                for i, d in zip(placement, demands):
                    for a in range(len(d)):
                        node_rem[i][a] -= d[a]
                choose_links(k, value, cfg, placement, bws, 0, [], 0)
                for i, d in zip(placement, demands):
                    for a in range(len(d)):
                        node_rem[i][a] += d[a]
        plan[k] = None
        slice_level(k + 1, value)

    def choose_links(k, value, cfg, placement, bws, idx, chosen, hops):
        remaining_links = len(bws) - idx
        if value + gamma - penalty * (hops + remaining_links) + tail[k + 1] <= best_value + EPS:
            return
        if idx == len(bws):
            plan[k] = (cfg, placement, list(chosen))
            slice_level(k + 1, value + gamma - penalty * hops)
            plan[k] = None
            return
        bw = bws[idx]
        for links in paths.get((placement[idx], placement[idx + 1]), ()):
            if any(link_rem[l] < bw - EPS for l in links):
                continue
            for l in links:
                link_rem[l] -= bw
            chosen.append(links)
            choose_links(k, value, cfg, placement, bws, idx + 1, chosen, hops + len(links))
            chosen.pop()
            for l in links:
                link_rem[l] += bw

    slice_level(0, 0.0)

    ids = net.node_ids
    decisions = []
    for s, entry in zip(slices, best_plan):
        if entry is None:
            decisions.append(AdmissionDecision(s.slice_id, False))
            continue
        cfg, placement, chosen = entry
        node_map = {v: ids[i] for v, i in zip(cfg.order, placement)}
        link_paths = {
            vw: [(ids[net.link_ends[l][0]], ids[net.link_ends[l][1]]) for l in links]
            for vw, links in zip(cfg.chain, chosen)
        }
        emb = Embedding(s.slice_id, cfg.config_id, node_map, link_paths)
        decisions.append(AdmissionDecision(s.slice_id, True, emb, cfg))
    return decisions, objective_value(decisions, gamma)


# LP export ------------------------------------------------------------------
# Variable names use integer indices: s = slice position, v/w = VNF position in
# slice.vnfs, i = node position, l = link position, p = chain position.
#   pi_s        slice accepted
#   x_s_v_i     VNF v on node i
#   f_s_v_w_l   virtual link (v, w) routed over link l
#   y_s_v_w     virtual link (v, w) is part of the chain
#   z_s_v_w_l   product f * y
#   t_s_v_p     VNF v at position p
_NAME = re.compile(r"^(pi|x|f|y|z|t)((?:_\d+)+)$")
_ARITY = {"pi": 1, "x": 3, "f": 4, "y": 3, "z": 4, "t": 3}


def _fmt(c: float) -> str:
    return f"{c:.12g}"


class _Rows:
    def __init__(self):
        self.lines: list[str] = []
        self.count = 0

    def add(self, name: str, terms: list[tuple[float, str]], sense: str, rhs: float) -> None:
        self.count += 1
        self.lines.extend(_expr(f" {name}:", terms, f" {sense} {_fmt(rhs)}"))


def _expr(head: str, terms: list[tuple[float, str]], tail: str = "") -> list[str]:
    pieces = []
    for c, var in terms:
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        pieces.append(f"{sign} {var}" if mag == 1 else f"{sign} {_fmt(mag)} {var}")
    lines = []
    current = head
    for k, piece in enumerate(pieces):
        if k and k % 8 == 0:
            lines.append(current)
            current = "   "
        current += " " + piece
    if not pieces:
        current += " 0"
    lines.append(current + tail)
    return lines


def lp_pairs(s: SliceRequest) -> list[tuple[int, int]]:
    """Ordered VNF index pairs that may form a virtual link: those with a bandwidth demand."""
    pos = {v: k for k, v in enumerate(s.vnf_ids)}
    return sorted((pos[v], pos[w]) for v, w in s.link_demands)


def export_lp(
    net: PhysicalNetwork,
    slices: Sequence[SliceRequest],
    gamma: float = 0.999,
    big_m: float | None = None,
) -> str:
    """Linearized joint admission/ordering/embedding model as LP text.

    Big-M defaults: ``|L| + 1`` for flow conservation and unused-link removal,
    ``|N_s| + 1`` for the position rule.  Capacities are ``net``'s remaining ones.
    """
    objective_value([], gamma)
    n_nodes = len(net.node_ids)
    n_links = len(net.link_ends)
    axes = net.axes
    rows = _Rows()
    binaries: list[str] = []
    objective: list[tuple[float, str]] = []
    node_load: dict[tuple[int, int], list[tuple[float, str]]] = {}
    link_load: dict[int, list[tuple[float, str]]] = {}
    out_links = [[l for l, (a, _) in enumerate(net.link_ends) if a == i] for i in range(n_nodes)]
    in_links = [[l for l, (_, b) in enumerate(net.link_ends) if b == i] for i in range(n_nodes)]
    m_flow = big_m if big_m is not None else n_links + 1

    per_slice_rows = []
    for si, s in enumerate(slices):
        n = len(s)
        m_pos = big_m if big_m is not None else n + 1
        pi = f"pi_{si}"
        binaries.append(pi)
        objective.append((gamma, pi))
        pairs = lp_pairs(s)
        ids = s.vnf_ids
        x = {(v, i): f"x_{si}_{v}_{i}" for v in range(n) for i in range(n_nodes)}
        t = {(v, p): f"t_{si}_{v}_{p}" for v in range(n) for p in range(1, n + 1)}
        y = {(v, w): f"y_{si}_{v}_{w}" for v, w in pairs}
        f = {(v, w, l): f"f_{si}_{v}_{w}_{l}" for v, w in pairs for l in range(n_links)}
        z = {(v, w, l): f"z_{si}_{v}_{w}_{l}" for v, w in pairs for l in range(n_links)}
        binaries += list(x.values()) + list(f.values()) + list(y.values()) + list(z.values()) + list(t.values())
        objective += [(-(1.0 - gamma), name) for name in f.values()]

        for v in range(n):
            demand = as_vector(s.demand(ids[v]), axes)
            for i in range(n_nodes):
                for a in range(len(axes)):
                    if demand[a]:
                        node_load.setdefault((i, a), []).append((demand[a], x[v, i]))
        for v, w in pairs:
            bw = s.link_demands[(ids[v], ids[w])]
            for l in range(n_links):
                link_load.setdefault(l, []).append((bw, z[v, w, l]))

        def position(v):
            return [(p, t[v, p]) for p in range(1, n + 1)]

        srows = _Rows()
        for v, w in pairs:
            for l in range(n_links):
                key = f"{si}_{v}_{w}_{l}"
                srows.add(f"zf_{key}", [(1, z[v, w, l]), (-1, f[v, w, l])], "<=", 0)
                srows.add(f"zy_{key}", [(1, z[v, w, l]), (-1, y[v, w])], "<=", 0)
                srows.add(f"zfy_{key}", [(1, z[v, w, l]), (-1, f[v, w, l]), (-1, y[v, w])], ">=", -1)
        for i in range(n_nodes):
            srows.add(f"once_{si}_{i}", [(1, x[v, i]) for v in range(n)] + [(-1, pi)], "<=", 0)
        for v in range(n):
            srows.add(f"serve_{si}_{v}", [(1, x[v, i]) for i in range(n_nodes)] + [(-1, pi)], "=", 0)
        for v, w in pairs:
            for i in range(n_nodes):
                flow = [(1, f[v, w, l]) for l in out_links[i]] + [(-1, f[v, w, l]) for l in in_links[i]]
                flow += [(-1, x[v, i]), (1, x[w, i])]
                srows.add(f"flowu_{si}_{v}_{w}_{i}", flow + [(m_flow, y[v, w])], "<=", m_flow)
                srows.add(f"flowl_{si}_{v}_{w}_{i}", flow + [(-m_flow, y[v, w])], ">=", -m_flow)
        for w in range(n):
            srows.add(f"in_{si}_{w}", [(1, y[v, ww]) for v, ww in pairs if ww == w] + [(-1, pi)], "<=", 0)
        for v in range(n):
            srows.add(f"out_{si}_{v}", [(1, y[vv, w]) for vv, w in pairs if vv == v] + [(-1, pi)], "<=", 0)
        pair_set = set(pairs)
        for v, w in pairs:
            if v < w and (w, v) in pair_set:
                srows.add(f"loop_{si}_{v}_{w}", [(1, y[v, w]), (1, y[w, v]), (-1, pi)], "<=", 0)
        srows.add(f"count_{si}", [(1, name) for name in y.values()] + [(-(n - 1), pi)], "=", 0)
        for v, w in pairs:
            diff = position(w) + [(-c, var) for c, var in position(v)]
            srows.add(f"posu_{si}_{v}_{w}", diff + [(m_pos, y[v, w])], "<=", 1 + m_pos)
            srows.add(f"posl_{si}_{v}_{w}", diff + [(-m_pos, y[v, w])], ">=", 1 - m_pos)
        for v, w in pairs:
            used = [(1, f[v, w, l]) for l in range(n_links)]
            srows.add(f"rmu_{si}_{v}_{w}", used + [(-m_flow, y[v, w])], "<=", 0)
            srows.add(f"rml_{si}_{v}_{w}", used + [(m_flow, y[v, w])], ">=", 0)
        for v in range(n):
            srows.add(f"onep_{si}_{v}", [(1, t[v, p]) for p in range(1, n + 1)] + [(-1, pi)], "=", 0)
        for p in range(1, n + 1):
            srows.add(f"onev_{si}_{p}", [(1, t[v, p]) for v in range(n)] + [(-1, pi)], "=", 0)
        index = {vid: k for k, vid in enumerate(ids)}
        for vid, p in sorted(s.fixed_positions.items(), key=lambda kv: index[kv[0]]):
            srows.add(f"fixp_{si}_{index[vid]}", [(1, t[index[vid], p]), (-1, pi)], "=", 0)
        by_pos = {p: index[vid] for vid, p in s.fixed_positions.items()}
        for p in sorted(by_pos):
            if p + 1 in by_pos:
                v, w = by_pos[p], by_pos[p + 1]
                srows.add(f"fixy_{si}_{v}_{w}", [(1, y[v, w]), (-1, pi)], "=", 0)
        per_slice_rows.append(srows)

    for (i, a), terms in sorted(node_load.items()):
        rows.add(f"ncap_{i}_{a}", terms, "<=", net.node_rem[i][a])
    for l, terms in sorted(link_load.items()):
        rows.add(f"lcap_{l}", terms, "<=", net.link_rem[l])
    for srows in per_slice_rows:
        rows.lines += srows.lines
        rows.count += srows.count

    out = ["\\ joint slice admission, VNF ordering and embedding", "Maximize"]
    out += _expr(" obj:", objective)
    out.append("Subject To")
    out += rows.lines
    if binaries:
        out.append("Binary")
        for k in range(0, len(binaries), 10):
            out.append(" " + " ".join(binaries[k:k + 10]))
    out.append("End")
    return "\n".join(out) + "\n"


def count_rows(lp_text: str) -> int:
    """Number of constraint rows in an LP text produced by :func:`export_lp`."""
    body = lp_text.split("Subject To", 1)[1].split("Binary", 1)[0].split("End", 1)[0]
    return sum(1 for line in body.splitlines() if re.match(r"^ [A-Za-z]\w*:", line))


def parse_solution(text: str) -> dict[str, float]:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'name value', got {line!r}")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: value {parts[1]!r} is not a number") from None
    return values


def import_solution(lp_solution: str, net: PhysicalNetwork, slices: Sequence[SliceRequest]) -> list[AdmissionDecision]:
    """Rebuild decisions from ``name value`` lines over :func:`export_lp`'s variables.

    Variables not listed are zero.
    """
    raw = parse_solution(lp_solution)
    n_nodes, n_links = len(net.node_ids), len(net.link_ends)
    ones: dict[str, set] = {k: set() for k in _ARITY}
    for name, value in raw.items():
        m = _NAME.match(name)
        if not m:
            raise ParseError(f"unknown variable {name!r}")
        kind = m.group(1)
        idx = tuple(int(k) for k in m.group(2)[1:].split("_"))
        if len(idx) != _ARITY[kind]:
            raise ParseError(f"unknown variable {name!r}")
        if not _in_range(kind, idx, slices, n_nodes, n_links):
            raise ParseError(f"variable {name!r} refers to an unknown slice, VNF, node, link or position")
        if abs(value) <= 1e-6:
            continue
        if abs(value - 1) <= 1e-6:
            ones[kind].add(idx)
            continue
        raise ParseError(f"binary variable {name!r} has non-binary value {value}")

    decisions = []
    ids = net.node_ids
    for si, s in enumerate(slices):
        if (si,) not in ones["pi"]:
            decisions.append(AdmissionDecision(s.slice_id, False))
            continue
        vnf_ids = s.vnf_ids
        n = len(s)
        positions = {}
        for v in range(n):
            ps = [p for (ss, vv, p) in ones["t"] if ss == si and vv == v]
            if len(ps) != 1:
                raise ParseError(f"slice {s.slice_id!r}: VNF {vnf_ids[v]!r} holds {len(ps)} positions")
            positions[vnf_ids[v]] = ps[0]
        cfg = _match_config(s, positions)
        chain_idx = {(ss_v, ss_w) for (ss, ss_v, ss_w) in ones["y"] if ss == si}
        pos = {v: k for k, v in enumerate(vnf_ids)}
        if chain_idx != {(pos[v], pos[w]) for v, w in cfg.chain}:
            raise ParseError(f"slice {s.slice_id!r}: chosen virtual links disagree with the positions")
        node_map = {}
        for v in range(n):
            nodes = [i for (ss, vv, i) in ones["x"] if ss == si and vv == v]
            if len(nodes) != 1:
                raise ParseError(f"slice {s.slice_id!r}: VNF {vnf_ids[v]!r} mapped to {len(nodes)} nodes")
            node_map[vnf_ids[v]] = nodes[0]
        link_paths = {}
        for vw in cfg.chain:
            v, w = pos[vw[0]], pos[vw[1]]
            used = {l for (ss, vv, ww, l) in ones["f"] if ss == si and vv == v and ww == w}
            path = _walk(net, used, node_map[vw[0]], node_map[vw[1]], s.slice_id, vw)
            link_paths[vw] = [(ids[net.link_ends[l][0]], ids[net.link_ends[l][1]]) for l in path]
        emb = Embedding(s.slice_id, cfg.config_id, {v: ids[i] for v, i in node_map.items()}, link_paths)
        decisions.append(AdmissionDecision(s.slice_id, True, emb, cfg))
    return decisions


def _in_range(kind, idx, slices, n_nodes, n_links) -> bool:
    si = idx[0]
    if si >= len(slices):
        return False
    n = len(slices[si])
    if kind == "pi":
        return True
    if kind == "x":
        return idx[1] < n and idx[2] < n_nodes
    if kind == "t":
        return idx[1] < n and 1 <= idx[2] <= n
    pairs = set(lp_pairs(slices[si]))
    if (idx[1], idx[2]) not in pairs:
        return False
    return kind == "y" or idx[3] < n_links


def _match_config(s: SliceRequest, positions: dict[str, int]) -> SliceConfiguration:
    for cfg in enumerate_configs(s):
        if cfg.positions == positions:
            return cfg
    raise ParseError(f"slice {s.slice_id!r}: positions {positions} are not an admissible configuration")


def _walk(net, used: set[int], src: int, dst: int, slice_id, vw) -> list[int]:
    path = []
    here = src
    remaining = set(used)
    while here != dst:
        nxt = [l for l in remaining if net.link_ends[l][0] == here]
        if len(nxt) != 1:
            raise ParseError(f"slice {slice_id!r}: flow of virtual link {vw} is not a single path")
        l = nxt[0]
        remaining.discard(l)
        path.append(l)
        here = net.link_ends[l][1]
    if remaining:
        raise ParseError(f"slice {slice_id!r}: flow of virtual link {vw} carries links off its path")
    return path


def solve_lp_highs(lp_text: str) -> tuple[str, float]:
    """Solve an exported model with HiGHS; returns ``(solution text, objective)``.

    Raises ``ImportError`` when ``highspy`` is not installed.
    """
    import os
    import tempfile

    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    fd, path = tempfile.mkstemp(suffix=".lp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(lp_text)
        h.readModel(path)
    finally:
        os.unlink(path)
    h.run()
    status = h.getModelStatus()
    if status == highspy.HighsModelStatus.kModelEmpty:
        return "", 0.0
    if status != highspy.HighsModelStatus.kOptimal:
        raise RuntimeError(f"HiGHS finished with status {h.modelStatusToString(status)}")
    lp = h.getLp()
    values = h.getSolution().col_value
    names = [lp.col_names_[k] for k in range(lp.num_col_)]
    lines = [f"{name} {round(val, 9):.9g}" for name, val in zip(names, values)]
    return "\n".join(lines) + "\n", h.getInfo().objective_function_value
