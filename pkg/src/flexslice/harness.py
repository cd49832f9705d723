"""Scenario runner: topology x slice setting x algorithm, with JSON/CSV reports.

Slice template document::

    {"vnfs": [{"id": "IDPS", "compute": 2, "storage": 2}, ...],
     "fixed": {"IDPS": 1, "GW": 4, "DU": 5},
     "link_demands": [{"from": "IDPS", "to": "VOC", "bandwidth": 5}, ...]}

JSON reports carry no timing so that repeated runs are byte-identical; wall
time goes to the CSV rows and to :class:`ScenarioResult`.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import os
import re
import time
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from . import bfn, bnb, exact
from .configs import config_label, enumerate_configs, pin_to_config
from .errors import ConfigurationError, FlexSliceError, ParseError, SpecificationError
from .model import (
    VNF,
    AdmissionDecision,
    Embedding,
    PhysicalNetwork,
    ScenarioResult,
    SliceRequest,
    objective_value,
    validate_embedding,
)
from .topology import resolve_topology

REPORT_SCHEMA_VERSION = 1
BUNDLED_TEMPLATES = {"video": "video_slice.json"}
ALGORITHMS = ("exact", "bnb", "bfn")
CSV_FIELDS = [
    "label", "topology", "setting", "algorithm", "beta", "seed", "slices",
    "accepted", "acceptance_rate", "objective", "wall_time",
]


def load_template(document, slice_id: str = "template") -> SliceRequest:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(document, dict) or not isinstance(document.get("vnfs"), list):
        raise ParseError("slice template: expected an object with a 'vnfs' list")
    vnfs = []
    for k, entry in enumerate(document["vnfs"]):
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError(f"vnfs[{k}]: expected an object with an 'id'")
        demand = {key: val for key, val in entry.items() if key != "id"}
        if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in demand.values()):
            raise ParseError(f"vnfs[{k}]: demands must be numbers")
        vnfs.append(VNF(str(entry["id"]), {a: float(v) for a, v in demand.items()}))
    links = {}
    for k, entry in enumerate(document.get("link_demands", [])):
        try:
            key = (str(entry["from"]), str(entry["to"]))
            bw = float(entry["bandwidth"])
        except (KeyError, TypeError, ValueError):
            raise ParseError(f"link_demands[{k}]: expected {{from, to, bandwidth}}") from None
        if key in links:
            raise ParseError(f"link_demands[{k}]: duplicate pair {key}")
        links[key] = bw
    fixed = document.get("fixed", {})
    if not isinstance(fixed, dict) or not all(isinstance(p, int) for p in fixed.values()):
        raise ParseError("fixed: expected an object mapping VNF id to an integer position")
    try:
        s = SliceRequest(slice_id, vnfs, links, {str(v): p for v, p in fixed.items()})
        enumerate_configs(s)
    except SpecificationError as exc:
        raise ParseError(f"slice template: {exc}") from None
    return s


def resolve_template(name_or_path: str) -> SliceRequest:
    if name_or_path in BUNDLED_TEMPLATES:
        text = resources.files("flexslice").joinpath("data").joinpath(BUNDLED_TEMPLATES[name_or_path]).read_text()
        return load_template(text)
    try:
        with open(name_or_path) as f:
            return load_template(f.read())
    except FileNotFoundError:
        raise ConfigurationError(
            f"slice template {name_or_path!r} is neither bundled {sorted(BUNDLED_TEMPLATES)} nor a readable file"
        ) from None


def replicate(template: SliceRequest, count: int, scale: float = 1.0) -> list[SliceRequest]:
    """``count`` identical copies of ``template`` with every demand multiplied by ``scale``."""
    out = []
    for k in range(count):
        out.append(
            SliceRequest(
                slice_id=f"s{k + 1}",
                vnfs=[VNF(v.id, {a: d * scale for a, d in v.demand.items()}) for v in template.vnfs],
                link_demands={vw: bw * scale for vw, bw in template.link_demands.items()},
                fixed_positions=dict(template.fixed_positions),
            )
        )
    return out


def normalize_setting(setting: str) -> str:
    s = setting.strip().lower()
    if s in ("flex", "flexible"):
        return "flexible"
    m = re.fullmatch(r"k(\d+)(-only)?", s)
    if m and int(m.group(1)) >= 1:
        return f"k{int(m.group(1))}-only"
    raise ConfigurationError(f"unknown setting {setting!r}; use 'flexible' or 'kN-only'")


def apply_setting(template: SliceRequest, setting: str) -> SliceRequest:
    """Pin the template to one configuration for ``kN-only``, leave it alone for ``flexible``."""
    setting = normalize_setting(setting)
    if setting == "flexible":
        return template
    k = int(setting[1:].split("-")[0])
    configs = enumerate_configs(template)
    if k > len(configs):
        raise ConfigurationError(f"setting {setting!r}: template has only {len(configs)} configurations")
    return pin_to_config(template, configs[k - 1])


@dataclass
class ScenarioSpec:
    topology: str
    template: str = "video"
    count: int = 15
    setting: str = "flexible"
    algorithm: str = "bnb"
    beta: int | None = None
    seed: int = 0
    gamma: float = 0.999
    rho1: float = 0.5
    rho2: float = 0.5
    scale: float = 1.0
    label: str | None = None

    def __post_init__(self):
        if self.count < 0:
            raise ConfigurationError(f"slice count must be >= 0, got {self.count}")
        if self.beta is not None and self.beta < 1:
            raise ConfigurationError(f"beta must be >= 1 or unlimited, got {self.beta}")
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}; use one of {ALGORITHMS}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigurationError(f"gamma must lie in [0, 1], got {self.gamma}")
        self.setting = normalize_setting(self.setting)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown scenario fields {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(str(exc)) from None

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        algo = self.algorithm
        if algo == "bnb":
            algo = f"bnb-{'inf' if self.beta is None else self.beta}"
        return f"{algo}/{self.setting}"


@dataclass
class Scenario:
    """A resolved spec: network, template and the slices to embed."""

    spec: ScenarioSpec
    network: PhysicalNetwork
    template: SliceRequest
    slices: list[SliceRequest]


def prepare(spec: ScenarioSpec) -> Scenario:
    try:
        net = resolve_topology(spec.topology)
        template = resolve_template(spec.template)
        pinned = apply_setting(template, spec.setting)
    except ConfigurationError:
        raise
    except FlexSliceError as exc:
        raise ConfigurationError(str(exc)) from None
    return Scenario(spec, net, template, replicate(pinned, spec.count, spec.scale))


def solve(scenario: Scenario) -> ScenarioResult:
    spec = scenario.spec
    net, slices = scenario.network, scenario.slices
    if spec.algorithm == "bnb":
        result = bnb.solve_all(net, slices, beta=spec.beta, rho1=spec.rho1, rho2=spec.rho2, gamma=spec.gamma)
    elif spec.algorithm == "bfn":
        result = bfn.solve_all(net, slices, seed=spec.seed, gamma=spec.gamma)
    else:
        start = time.perf_counter()
        decisions, value = exact.brute_force(net, slices, gamma=spec.gamma)
        result = ScenarioResult(decisions, value, {}, time.perf_counter() - start)
    report = validate_embedding(net, list(zip(slices, result.decisions)))
    if not report.ok:
        raise RuntimeError(f"{spec.name}: solver output fails validation:\n{report}")
    counts = {f"k{c.config_id}": 0 for c in enumerate_configs(scenario.template)}
    for d in result.decisions:
        if d.accepted:
            counts[config_label(scenario.template, d.config.positions)] += 1
    result.per_config_counts = counts
    return result


def build_report(scenario: Scenario, result: ScenarioResult) -> dict:
    spec = scenario.spec
    template = scenario.template
    decisions = []
    for d in result.decisions:
        entry = {"slice": d.slice_id, "accepted": d.accepted}
        if d.accepted:
            emb = d.embedding
            entry["config"] = config_label(template, d.config.positions)
            entry["order"] = d.config.order
            entry["node_map"] = {v: emb.node_map[v] for v in d.config.order}
            entry["link_paths"] = [
                {"from": v, "to": w, "links": [list(link) for link in emb.link_paths[(v, w)]]}
                for v, w in d.config.chain
            ]
        decisions.append(entry)
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "scenario": dataclasses.asdict(spec),
        "network": {"nodes": len(scenario.network.node_ids), "links": len(scenario.network.link_ends)},
        "summary": {
            "slices": len(result.decisions),
            "accepted": result.accepted,
            "acceptance_rate": result.acceptance_rate,
            "objective": result.objective,
            "total_hops": sum(d.embedding.hops for d in result.decisions if d.accepted),
        },
        "per_config_counts": result.per_config_counts,
        "decisions": decisions,
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def csv_row(scenario: Scenario, result: ScenarioResult) -> dict:
    spec = scenario.spec
    row = {
        "label": spec.name,
        "topology": spec.topology,
        "setting": spec.setting,
        "algorithm": spec.algorithm,
        "beta": "inf" if spec.beta is None else spec.beta,
        "seed": spec.seed,
        "slices": len(result.decisions),
        "accepted": result.accepted,
        "acceptance_rate": "" if result.acceptance_rate is None else f"{result.acceptance_rate:.6f}",
        "objective": f"{result.objective:.6f}",
        "wall_time": f"{result.wall_time:.6f}",
    }
    for label, count in result.per_config_counts.items():
        row[f"accepted_{label}"] = count
    return row


def append_csv(path: str, row: dict) -> None:
    exists = os.path.exists(path) and os.path.getsize(path) > 0
    with open(path, "a", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(row))
        if not exists:
            writer.writeheader()
        writer.writerow(row)


def run_scenario(spec: ScenarioSpec, out: str | None = None, csv_path: str | None = None) -> tuple[ScenarioResult, dict]:
    """Resolve, solve, validate and report one scenario."""
    scenario = prepare(spec)
    result = solve(scenario)
    report = build_report(scenario, result)
    if out:
        with open(out, "w") as f:
            f.write(dump_report(report))
    if csv_path:
        append_csv(csv_path, csv_row(scenario, result))
    return result, report


_VARIANT_FIELDS = {"setting", "algorithm", "beta", "seed", "label"}


def compare_settings(base: ScenarioSpec, variants: Sequence[dict]) -> list[dict]:
    """One table row per variant of ``base``; variants may change only setting, algorithm, beta, seed and label."""
    specs = []
    for k, variant in enumerate(variants):
        bad = set(variant) - _VARIANT_FIELDS
        if bad:
            raise ConfigurationError(f"variant {k} changes {sorted(bad)}; only {sorted(_VARIANT_FIELDS)} may differ")
        fields = dataclasses.asdict(base)
        fields.update(variant)
        specs.append(ScenarioSpec.from_dict(fields))
    rows = []
    for spec in specs:
        scenario = prepare(spec)
        result = solve(scenario)
        rows.append(csv_row(scenario, result))
    return rows


def load_compare_file(document) -> tuple[ScenarioSpec, list[dict]]:
    """``{"base": {...}, "variants": [...]}`` or a list of full specs sharing one topology."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"comparison file: line {exc.lineno}: {exc.msg}") from None
    if isinstance(document, dict) and "base" in document:
        return ScenarioSpec.from_dict(document["base"]), list(document.get("variants", []))
    if isinstance(document, list) and document:
        specs = [ScenarioSpec.from_dict(d) for d in document]
        base = specs[0]
        variants = []
        for spec in specs:
            for name in ("topology", "template", "count", "gamma", "rho1", "rho2", "scale"):
                if getattr(spec, name) != getattr(base, name):
                    raise ConfigurationError(f"spec {spec.name!r} differs from the first in {name!r}")
            variants.append({k: getattr(spec, k) for k in _VARIANT_FIELDS})
        return base, variants
    raise ConfigurationError("comparison file: expected {'base', 'variants'} or a non-empty list of specs")


def write_table(rows: list[dict], path: str) -> None:
    fields: list[str] = []
    for row in rows:
        for key in row:
            if key not in fields:
                fields.append(key)
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def report_schema() -> dict:
    return json.loads(resources.files("flexslice").joinpath("data").joinpath("report_schema.json").read_text())


def decisions_from_report(report: dict, scenario: Scenario) -> list[AdmissionDecision]:
    """Rebuild decisions from a report, e.g. to recompute its objective."""
    by_id = {s.slice_id: s for s in scenario.slices}
    out = []
    for entry in report["decisions"]:
        s = by_id[entry["slice"]]
        if not entry["accepted"]:
            out.append(AdmissionDecision(s.slice_id, False))
            continue
        order = entry["order"]
        positions = {v: k + 1 for k, v in enumerate(order)}
        cfg = next(c for c in enumerate_configs(s) if c.positions == positions)
        paths = {(p["from"], p["to"]): [tuple(link) for link in p["links"]] for p in entry["link_paths"]}
        emb = Embedding(s.slice_id, cfg.config_id, dict(entry["node_map"]), paths)
        out.append(AdmissionDecision(s.slice_id, True, emb, cfg))
    return out


def recompute_objective(report: dict, scenario: Scenario) -> float:
    return objective_value(decisions_from_report(report, scenario), scenario.spec.gamma)


__all__ = [
    "ScenarioSpec", "Scenario", "prepare", "solve", "run_scenario", "compare_settings",
    "build_report", "dump_report", "load_template", "resolve_template", "replicate",
    "apply_setting", "normalize_setting", "load_compare_file", "write_table", "report_schema",
    "decisions_from_report", "recompute_objective",
]
