"""
Scenario files and trace serialisation.

A scenario is a YAML document (``schema_version: 1``) with the sections
``topology``, ``users``, ``score_tables``, ``policy``, ``tradeoffs``,
``overhead`` and ``deployment``, plus optional ``throughput`` and
``placements``.  Units: latency in ms, throughput in Mbps, RAM in GB,
prices in currency per unit-hour, ``t_action`` in seconds.  See
``data/reference.scenario`` for a complete annotated example.

Traces are written as two CSV files (``candidates.csv`` in long format, one
row per step and candidate; ``summary.csv``, one row per step) and a JSON
report.  Every float is printed with four decimals so identical traces give
identical bytes.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import yaml

from .constraints import CONSTRAINT_ORDER, ConstraintPolicy, Enforcement, Strictness
from .costs import OverheadMode, OverheadModel
from .model import (Access, ConfigurationError, ContentDescriptor, DeploymentMode, DistributionMode, ExtraColumn,
                    Interaction, Interface, Link, NodeSpec, Perception, Processing, ResourceVector, Role, ScoreTable,
                    Tier, Topology, UserProfile)
from .orchestrator import (LinkLatencyChanged, NodeResourcesChanged, Placement, TradeoffVector, Trace, UserJoined,
                           UserLeft)

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "XRORCH_OUTPUT_DIR"


class ScenarioError(ConfigurationError):
    """Invalid scenario content; ``locator`` points at the offending field."""

    def __init__(self, locator: str, message: str):
        self.locator = locator
        super().__init__(f"{locator}: {message}")


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    users: Mapping[str, UserProfile]
    events: tuple
    score_table: ScoreTable
    policy: ConstraintPolicy = ConstraintPolicy()
    tradeoffs: TradeoffVector = TradeoffVector()
    overhead: OverheadModel = OverheadModel()
    deployment: DeploymentMode = DeploymentMode()
    pop: int = 1
    weight_combiner: str = "uel"
    throughput_table: Mapping[str, float] | None = None
    placements: tuple[Placement, ...] = ()
    name: str = ""
    notes: str = field(default="", compare=False)


def reference_scenario_path() -> Path:
    return Path(str(resources.files("xrorch") / "data" / "reference.scenario"))


# ---- parsing -----------------------------------------------------------------

def _get(d: Mapping, key: str, loc: str, default=...):
    if not isinstance(d, Mapping):
        raise ScenarioError(loc, f"expected a mapping, got {type(d).__name__}")
    if key in d:
        return d[key]
    if default is ...:
        raise ScenarioError(f"{loc}.{key}" if loc else key, "missing required field")
    return default


def _num(value, loc: str, *, allow_inf: bool = False) -> float:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity", ".inf"):
        value = math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(loc, f"expected a number, got {value!r}")
    value = float(value)
    if math.isnan(value) or (math.isinf(value) and not allow_inf):
        raise ScenarioError(loc, f"expected a finite number, got {value!r}")
    return value


def _enum(cls, value, loc: str):
    try:
        return cls(value)
    except ValueError:
        choices = ", ".join(m.value for m in cls)
        raise ScenarioError(loc, f"{value!r} is not one of: {choices}") from None


def _resources(d, loc: str) -> ResourceVector:
    if not isinstance(d, Mapping):
        raise ScenarioError(loc, "expected a mapping with vcpu/ram/gpu")
    unknown = set(d) - {"vcpu", "ram", "gpu"}
    if unknown:
        raise ScenarioError(loc, f"unknown resource components {sorted(unknown)}")
    vals = {k: _num(v, f"{loc}.{k}") for k, v in d.items()}
    for k, v in vals.items():
        if v < 0:
            raise ScenarioError(f"{loc}.{k}", "must be >= 0")
    return ResourceVector(**vals)


def _build(loc: str, ctor, *args, **kwargs):
    try:
        return ctor(*args, **kwargs)
    except ScenarioError:
        raise
    except (ValueError, TypeError) as exc:
        raise ScenarioError(loc, str(exc)) from None


def _parse_node(d, loc: str) -> NodeSpec:
    node_id = str(_get(d, "id", loc))
    return _build(loc, NodeSpec,
                  id=node_id,
                  tier=_enum(Tier, _get(d, "tier", loc), f"{loc}.tier"),
                  r_max=_resources(_get(d, "r_max", loc), f"{loc}.r_max"),
                  r_assigned=_resources(_get(d, "r_assigned", loc), f"{loc}.r_assigned"),
                  price=_resources(_get(d, "price", loc), f"{loc}.price"),
                  energy_rate=_num(_get(d, "energy_rate", loc, 0.0), f"{loc}.energy_rate"),
                  tariff=_num(_get(d, "tariff", loc, 0.0), f"{loc}.tariff"),
                  scalable=bool(_get(d, "scalable", loc, True)),
                  t_action=_num(_get(d, "t_action", loc, 0.0), f"{loc}.t_action"),
                  access=_enum(Access, _get(d, "access", loc, "Open"), f"{loc}.access"),
                  region=str(_get(d, "region", loc, "")),
                  domain=str(_get(d, "domain", loc, "")))


def _parse_link(d, loc: str) -> Link:
    cap = _get(d, "capacity", loc, None)
    return _build(loc, Link,
                  str(_get(d, "a", loc)), str(_get(d, "b", loc)),
                  _num(_get(d, "latency", loc), f"{loc}.latency"),
                  _enum(Interface, _get(d, "interface", loc, "Wired"), f"{loc}.interface"),
                  None if cap is None else _num(cap, f"{loc}.capacity"))


def _parse_topology(d) -> Topology:
    loc = "topology"
    nodes = {}
    for i, nd in enumerate(_get(d, "nodes", loc)):
        node = _parse_node(nd, f"{loc}.nodes[{i}]")
        if node.id in nodes:
            raise ScenarioError(f"{loc}.nodes[{i}].id", f"duplicate node id {node.id!r}")
        nodes[node.id] = node
    if not nodes:
        raise ScenarioError(f"{loc}.nodes", "at least one compute node is required")
    links = tuple(_parse_link(ld, f"{loc}.links[{i}]") for i, ld in enumerate(_get(d, "links", loc, []) or []))
    attachments = {}
    for ue, node in (_get(d, "attachments", loc, {}) or {}).items():
        if node not in nodes:
            raise ScenarioError(f"{loc}.attachments.{ue}", f"attaches to unknown node {node!r}")
        attachments[str(ue)] = str(node)
    for i, link in enumerate(links):
        for end in (link.endpoint_a, link.endpoint_b):
            if end not in nodes and end not in attachments:
                raise ScenarioError(f"{loc}.links[{i}]", f"endpoint {end!r} is neither a node nor an attached UE")
    return Topology(nodes, links, attachments)


def _check_connected(topo: Topology):
    for ue in sorted(topo.ue_attachments):
        dist = topo.latencies_from(topo.source_for(ue))
        missing = [n for n in topo.node_ids if n not in dist]
        if missing:
            raise ScenarioError(f"topology.attachments.{ue}", f"cannot reach nodes {missing}")


def _parse_user(d, loc: str, resource_table: Mapping[str, ResourceVector], topo: Topology) -> UserProfile:
    user_id = str(_get(d, "id", loc))
    perception = _enum(Perception, _get(d, "self_perception", loc), f"{loc}.self_perception")
    usage = _get(d, "r_usage", loc, None)
    if usage is None:
        if perception.value not in resource_table:
            raise ScenarioError(f"{loc}.r_usage", f"missing and no resource_table entry for {perception.value!r}")
        r_usage = resource_table[perception.value]
    else:
        r_usage = _resources(usage, f"{loc}.r_usage")
    attachment = str(_get(d, "attachment", loc, user_id))
    if attachment not in topo.ue_attachments:
        raise ScenarioError(f"{loc}.attachment", f"user {user_id} references unknown UE attachment {attachment!r}")
    cd = _get(d, "content", loc, {}) or {}
    content = _build(f"{loc}.content", ContentDescriptor,
                     static_complexity=_num(_get(cd, "static_complexity", f"{loc}.content", 0.0),
                                            f"{loc}.content.static_complexity"),
                     dynamic_complexity=_num(_get(cd, "dynamic_complexity", f"{loc}.content", 0.0),
                                             f"{loc}.content.dynamic_complexity"),
                     fg_consistency=bool(_get(cd, "fg_consistency", f"{loc}.content", False)),
                     bg_consistency=bool(_get(cd, "bg_consistency", f"{loc}.content", False)))
    th_min = _get(d, "th_min", loc, None)
    others = _get(d, "others_perception", loc, None)
    return _build(loc, UserProfile,
                  id=user_id,
                  role=_enum(Role, _get(d, "role", loc), f"{loc}.role"),
                  interaction=_enum(Interaction, _get(d, "interaction", loc), f"{loc}.interaction"),
                  self_perception=perception,
                  quality_profile=str(_get(d, "quality_profile", loc)),
                  l_max=_num(_get(d, "l_max", loc), f"{loc}.l_max"),
                  l_proc=_num(_get(d, "l_proc", loc), f"{loc}.l_proc"),
                  r_usage=r_usage,
                  attachment=attachment,
                  others_perception=None if others is None else str(others),
                  th_min=None if th_min is None else _num(th_min, f"{loc}.th_min"),
                  content=content,
                  prefs=_num(_get(d, "prefs", loc, 0.5), f"{loc}.prefs"))


def _parse_event(d, loc: str, profiles: Mapping[str, UserProfile], topo: Topology):
    if not isinstance(d, Mapping):
        raise ScenarioError(loc, "expected a mapping")
    if "join" in d:
        uid = str(d["join"])
        if uid not in profiles:
            raise ScenarioError(f"{loc}.join", f"unknown user {uid!r}")
        return UserJoined(profiles[uid])
    if "leave" in d:
        uid = str(d["leave"])
        if uid not in profiles:
            raise ScenarioError(f"{loc}.leave", f"unknown user {uid!r}")
        return UserLeft(uid)
    if "node" in d:
        nid = str(d["node"])
        if nid not in topo.nodes:
            raise ScenarioError(f"{loc}.node", f"unknown node {nid!r}")
        r_max = d.get("r_max")
        r_assigned = d.get("r_assigned")
        if r_max is None and r_assigned is None:
            raise ScenarioError(loc, "node event needs r_max and/or r_assigned")
        return NodeResourcesChanged(nid,
                                    None if r_assigned is None else _resources(r_assigned, f"{loc}.r_assigned"),
                                    None if r_max is None else _resources(r_max, f"{loc}.r_max"))
    if "link" in d:
        ends = d["link"]
        if not isinstance(ends, (list, tuple)) or len(ends) != 2:
            raise ScenarioError(f"{loc}.link", "expected [endpoint_a, endpoint_b]")
        a, b = (str(e) for e in ends)
        if not any(link.key == frozenset((a, b)) for link in topo.links):
            raise ScenarioError(f"{loc}.link", f"no link between {a!r} and {b!r}")
        return LinkLatencyChanged(a, b, _num(_get(d, "latency", loc), f"{loc}.latency"))
    raise ScenarioError(loc, "event must have one of: join, leave, node, link")


def _score_map(d, loc: str) -> dict[str, float]:
    if not isinstance(d, Mapping):
        raise ScenarioError(loc, "expected a mapping of value -> score")
    out = {}
    for k, v in d.items():
        score = _num(v, f"{loc}.{k}")
        if not 0.0 <= score <= 1.0:
            raise ScenarioError(f"{loc}.{k}", f"score {score} is outside [0, 1]")
        out[str(k)] = score
    return out


def _parse_score_table(d) -> ScoreTable:
    loc = "score_tables"
    weights = _get(d, "weights", loc)
    w = {k: _num(_get(weights, k, f"{loc}.weights"), f"{loc}.weights.{k}") for k in ("w_r", "w_i", "w_rq", "w_ps")}
    extra = []
    for i, col in enumerate(_get(d, "extra", loc, []) or []):
        cloc = f"{loc}.extra[{i}]"
        scores = _get(col, "scores", cloc, None)
        extra.append(_build(cloc, ExtraColumn, str(_get(col, "attribute", cloc)),
                            _num(_get(col, "weight", cloc), f"{cloc}.weight"),
                            None if scores is None else _score_map(scores, f"{cloc}.scores")))
    total = sum(w.values()) + sum(c.weight for c in extra)
    if abs(total - 1.0) > 1e-9:
        raise ScenarioError(f"{loc}.weights", f"weights sum to {total:.6g}, expected 1")
    return _build(loc, ScoreTable,
                  role_scores=_score_map(_get(d, "role", loc), f"{loc}.role"),
                  interaction_scores=_score_map(_get(d, "interaction", loc), f"{loc}.interaction"),
                  quality_scores=_score_map(_get(d, "quality", loc), f"{loc}.quality"),
                  perception_scores=_score_map(_get(d, "perception", loc), f"{loc}.perception"),
                  extra=tuple(extra), **w)


def _parse_enforcement(v, loc: str) -> Enforcement:
    if isinstance(v, str):
        kind = _enum(Strictness, v, loc)
        if kind is Strictness.SOFT:
            raise ScenarioError(loc, "soft constraints need a penalty: {Soft: <penalty>}")
        return Enforcement(kind)
    if isinstance(v, Mapping) and set(v) == {"Soft"}:
        penalty = _num(v["Soft"], f"{loc}.Soft")
        if penalty < 0:
            raise ScenarioError(f"{loc}.Soft", "penalty must be >= 0")
        return Enforcement.soft(penalty)
    raise ScenarioError(loc, f"expected Hard, Off or {{Soft: penalty}}, got {v!r}")


def _parse_policy(d) -> ConstraintPolicy:
    loc = "policy"
    d = d or {}
    strict = {}
    for name, v in (_get(d, "strictness", loc, {}) or {}).items():
        if name not in CONSTRAINT_ORDER:
            raise ScenarioError(f"{loc}.strictness.{name}", f"unknown constraint; expected one of {CONSTRAINT_ORDER}")
        strict[name] = _parse_enforcement(v, f"{loc}.strictness.{name}")
    rate = _get(d, "capex_rate", loc, None)
    return _build(loc, ConstraintPolicy,
                  strictness=strict,
                  c_opex=_num(_get(d, "c_opex", loc, math.inf), f"{loc}.c_opex", allow_inf=True),
                  c_capex=_num(_get(d, "c_capex", loc, math.inf), f"{loc}.c_capex", allow_inf=True),
                  capex_rate=ResourceVector() if rate is None else _resources(rate, f"{loc}.capex_rate"),
                  s_oh_max=_num(_get(d, "s_oh_max", loc, math.inf), f"{loc}.s_oh_max", allow_inf=True),
                  m_oh_max=_num(_get(d, "m_oh_max", loc, math.inf), f"{loc}.m_oh_max", allow_inf=True),
                  content_multiplier=bool(_get(d, "content_multiplier", loc, False)))


def _parse_overhead(d) -> OverheadModel:
    loc = "overhead"
    d = d or {}
    norm = _get(d, "ro_normalizer", loc, None)
    overrides = {str(k): _num(v, f"{loc}.tier_overrides.{k}")
                 for k, v in (_get(d, "tier_overrides", loc, {}) or {}).items()}
    return _build(loc, OverheadModel,
                  scaling_overhead=_num(_get(d, "scaling_overhead", loc, 0.5), f"{loc}.scaling_overhead"),
                  migration_overhead=_num(_get(d, "migration_overhead", loc, 1.0), f"{loc}.migration_overhead"),
                  ro_normalizer=None if norm is None else _num(norm, f"{loc}.ro_normalizer"),
                  mode=_enum(OverheadMode, _get(d, "mode", loc, "FixedConstants"), f"{loc}.mode"),
                  tier_overrides=overrides)


def _parse_placements(items, topo: Topology) -> tuple[Placement, ...]:
    out = []
    seen = set()
    for i, d in enumerate(items or []):
        loc = f"placements[{i}]"
        pid = str(_get(d, "id", loc))
        if pid in seen or pid.startswith("PL") and pid[2:].isdigit():
            raise ScenarioError(f"{loc}.id", f"placement id {pid!r} is duplicated or collides with PL<n>")
        seen.add(pid)
        nodes = tuple(str(n) for n in _get(d, "nodes", loc))
        for n in nodes:
            if n not in topo.nodes:
                raise ScenarioError(f"{loc}.nodes", f"unknown node {n!r}")
        assignment = {str(k): str(v) for k, v in (_get(d, "assignment", loc, {}) or {}).items()}
        out.append(_build(loc, Placement, pid, nodes, assignment))
    return tuple(out)


def parse_scenario(doc: Mapping[str, Any]) -> Scenario:
    """Validate a scenario document (already parsed from YAML/JSON)."""
    if not isinstance(doc, Mapping):
        raise ScenarioError("<root>", "scenario must be a mapping")
    version = _get(doc, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise ScenarioError("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION}")
    topo = _parse_topology(_get(doc, "topology", ""))
    _check_connected(topo)

    users_doc = _get(doc, "users", "")
    resource_table = {str(k): _resources(v, f"users.resource_table.{k}")
                      for k, v in (_get(users_doc, "resource_table", "users", {}) or {}).items()}
    profiles = {}
    for i, ud in enumerate(_get(users_doc, "profiles", "users")):
        user = _parse_user(ud, f"users.profiles[{i}]", resource_table, topo)
        if user.id in profiles:
            raise ScenarioError(f"users.profiles[{i}].id", f"duplicate user id {user.id!r}")
        profiles[user.id] = user
    events = tuple(_parse_event(ev, f"users.schedule[{i}]", profiles, topo)
                   for i, ev in enumerate(_get(users_doc, "schedule", "users", []) or []))

    table = _parse_score_table(_get(doc, "score_tables", ""))
    for uid, u in profiles.items():
        for attr, col in (("role", table.role_scores), ("interaction", table.interaction_scores),
                          ("quality_profile", table.quality_scores), ("self_perception", table.perception_scores)):
            val = getattr(u, attr)
            key = getattr(val, "value", val)
            if key not in col:
                raise ScenarioError("score_tables", f"no score for {attr} {key!r} used by user {uid}")

    td = _get(doc, "tradeoffs", "")
    tradeoffs = _build("tradeoffs", TradeoffVector,
                       _num(_get(td, "alpha", "tradeoffs"), "tradeoffs.alpha"),
                       _num(_get(td, "beta", "tradeoffs"), "tradeoffs.beta"),
                       _num(_get(td, "lambda", "tradeoffs"), "tradeoffs.lambda"))

    dd = _get(doc, "deployment", "", {}) or {}
    deployment = _build("deployment", DeploymentMode,
                        mode=_enum(DistributionMode, _get(dd, "mode", "deployment", "PartiallyDistributed"),
                                   "deployment.mode"),
                        uol=_num(_get(dd, "uol", "deployment", 1.0), "deployment.uol"),
                        processing=_enum(Processing, _get(dd, "processing", "deployment", "Centralised"),
                                         "deployment.processing"))
    pop = _get(dd, "pop", "deployment", 1)
    if pop != 1:
        raise ScenarioError("deployment.pop", "only pop = 1 placements are enumerated; list others under placements")
    combiner = str(_get(dd, "weight_combiner", "deployment", "uel"))
    if combiner not in ("uel", "extended"):
        raise ScenarioError("deployment.weight_combiner", f"expected 'uel' or 'extended', got {combiner!r}")

    th = _get(doc, "throughput", "", None)
    throughput = None if th is None else {str(k): _num(v, f"throughput.{k}") for k, v in th.items()}

    return Scenario(
        topology=topo, users=profiles, events=events, score_table=table,
        policy=_parse_policy(_get(doc, "policy", "", {})),
        tradeoffs=tradeoffs,
        overhead=_parse_overhead(_get(doc, "overhead", "", {})),
        deployment=deployment, pop=pop, weight_combiner=combiner,
        throughput_table=throughput,
        placements=_parse_placements(_get(doc, "placements", "", []), topo),
        name=str(_get(doc, "name", "", "")),
        notes=str(_get(doc, "notes", "", "")),
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(str(path), f"parse error: {exc}") from None
    return parse_scenario(doc)


# ---- dumping -----------------------------------------------------------------

def _rv(v: ResourceVector) -> dict:
    d = {"vcpu": v.vcpu, "ram": v.ram}
    if v.gpu:
        d["gpu"] = v.gpu
    return d


def _inf(x: float):
    return "inf" if math.isinf(x) else x


def dump_scenario(s: Scenario) -> dict:
    """Inverse of :func:`parse_scenario` (resource tables are expanded per user)."""
    topo = s.topology
    nodes = [{
        "id": n.id, "tier": n.tier.value, "r_max": _rv(n.r_max), "r_assigned": _rv(n.r_assigned),
        "price": _rv(n.price), "energy_rate": n.energy_rate, "tariff": n.tariff, "scalable": n.scalable,
        "t_action": n.t_action, "access": n.access.value, "region": n.region, "domain": n.domain,
    } for n in topo.nodes.values()]
    links = []
    for link in topo.links:
        ld = {"a": link.endpoint_a, "b": link.endpoint_b, "latency": link.latency,
              "interface": link.interface.value}
        if link.capacity is not None:
            ld["capacity"] = link.capacity
        links.append(ld)
    profiles = []
    for u in s.users.values():
        ud = {"id": u.id, "role": u.role.value, "interaction": u.interaction.value,
              "self_perception": u.self_perception.value, "others_perception": u.others_perception,
              "quality_profile": u.quality_profile, "l_max": u.l_max, "l_proc": u.l_proc,
              "r_usage": _rv(u.r_usage), "attachment": u.attachment, "prefs": u.prefs,
              "content": dataclasses.asdict(u.content)}
        if u.th_min is not None:
            ud["th_min"] = u.th_min
        profiles.append(ud)
    schedule = []
    for ev in s.events:
        if isinstance(ev, UserJoined):
            schedule.append({"join": ev.profile.id})
        elif isinstance(ev, UserLeft):
            schedule.append({"leave": ev.user_id})
        elif isinstance(ev, NodeResourcesChanged):
            e = {"node": ev.node_id}
            if ev.r_max is not None:
                e["r_max"] = _rv(ev.r_max)
            if ev.r_assigned is not None:
                e["r_assigned"] = _rv(ev.r_assigned)
            schedule.append(e)
        else:
            schedule.append({"link": [ev.endpoint_a, ev.endpoint_b], "latency": ev.latency})
    t = s.score_table
    score_tables = {
        "role": dict(t.role_scores), "interaction": dict(t.interaction_scores),
        "quality": dict(t.quality_scores), "perception": dict(t.perception_scores),
        "weights": {"w_r": t.w_r, "w_i": t.w_i, "w_rq": t.w_rq, "w_ps": t.w_ps},
    }
    if t.extra:
        score_tables["extra"] = [
            {"attribute": c.attribute, "weight": c.weight, **({"scores": dict(c.scores)} if c.scores else {})}
            for c in t.extra]
    p = s.policy
    strictness = {}
    for name, e in p.strictness.items():
        strictness[name] = {"Soft": e.penalty} if e.kind is Strictness.SOFT else e.kind.value
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": s.name,
        "topology": {"nodes": nodes, "links": links, "attachments": dict(topo.ue_attachments)},
        "users": {"profiles": profiles, "schedule": schedule},
        "score_tables": score_tables,
        "policy": {"strictness": strictness, "c_opex": _inf(p.c_opex), "c_capex": _inf(p.c_capex),
                   "capex_rate": _rv(p.capex_rate), "s_oh_max": _inf(p.s_oh_max), "m_oh_max": _inf(p.m_oh_max),
                   "content_multiplier": p.content_multiplier},
        "tradeoffs": {"alpha": s.tradeoffs.alpha, "beta": s.tradeoffs.beta, "lambda": s.tradeoffs.lam},
        "overhead": {"scaling_overhead": s.overhead.scaling_overhead,
                     "migration_overhead": s.overhead.migration_overhead,
                     "ro_normalizer": s.overhead.ro_normalizer, "mode": s.overhead.mode.value,
                     "tier_overrides": dict(s.overhead.tier_overrides)},
        "deployment": {"mode": s.deployment.mode.value, "uol": s.deployment.uol,
                       "processing": s.deployment.processing.value, "pop": s.pop,
                       "weight_combiner": s.weight_combiner},
    }
    if s.throughput_table is not None:
        doc["throughput"] = dict(s.throughput_table)
    if s.placements:
        doc["placements"] = [{"id": pl.id, "nodes": list(pl.node_set), "assignment": dict(pl.explicit)}
                             for pl in s.placements]
    if s.notes:
        doc["notes"] = s.notes
    return doc


def save_scenario(s: Scenario, path) -> None:
    Path(path).write_text(yaml.safe_dump(dump_scenario(s), sort_keys=False), encoding="utf-8")


# ---- traces ------------------------------------------------------------------

def fmt(x) -> str:
    """Fixed four-decimal rendering used by every trace output."""
    if x is None:
        return ""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.4f}"
    return "0.0000" if s == "-0.0000" else s


def _jnum(x):
    if x is None:
        return None
    s = fmt(x)
    return s if "inf" in s else float(s)


CANDIDATE_COLUMNS = ("step", "event", "placement", "status", "qos_norm", "cost_norm", "ro_norm", "penalty",
                     "f", "discard_reason", "chosen", "op")
SUMMARY_COLUMNS = ("time", "context_change", "j_current", "j_best", "f_best", "ro")


def candidate_rows(trace: Trace):
    for r in trace:
        for s in r.scores:
            chosen = s.placement_id == r.j_best
            yield {
                "step": r.step, "event": r.event, "placement": s.placement_id,
                "status": s.verdict.status.value, "qos_norm": fmt(s.qos_norm), "cost_norm": fmt(s.cost_norm),
                "ro_norm": fmt(s.ro_norm), "penalty": fmt(s.penalty), "f": fmt(s.f),
                "discard_reason": s.verdict.reason if s.discarded else "",
                "chosen": int(chosen), "op": r.op.value if chosen else "",
            }


def summary_rows(trace: Trace):
    for r in trace:
        yield {
            "time": f"t{r.step}", "context_change": r.event, "j_current": r.j_current or "None",
            "j_best": r.j_best or "None", "f_best": fmt(r.f_best) or "None",
            "ro": "Degraded" if r.degraded else r.op.value,
        }


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\r\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()


def trace_to_dict(trace: Trace, scenario_name: str = "") -> dict:
    steps = []
    for r in trace:
        steps.append({
            "step": r.step, "event": r.event, "j_current": r.j_current, "j_best": r.j_best,
            "f_best": _jnum(r.f_best), "op": r.op.value, "degraded": r.degraded, "parked": r.parked,
            "error": r.error,
            "scaling": {n: {"from": _rv(a), "to": _rv(b)} for n, (a, b) in sorted(r.deltas.items())},
            "state": r.digest,
            "candidates": [{
                "placement": s.placement_id, "status": s.verdict.status.value, "reason": s.verdict.reason,
                "qos_norm": _jnum(s.qos_norm), "cost_norm": _jnum(s.cost_norm), "ro_norm": _jnum(s.ro_norm),
                "penalty": _jnum(s.penalty), "f": _jnum(s.f), "needs_scaling": s.needs_scaling,
                "constraints": {name: {"satisfied": c.satisfied, "margin": _jnum(c.margin)}
                                for name, c in s.verdict.per_constraint.items()},
            } for s in r.scores],
        })
    return {"scenario": scenario_name, "steps": steps,
            "errors": [{"step": i, "message": m} for i, m in trace.errors]}


def trace_json(trace: Trace, scenario_name: str = "") -> str:
    return json.dumps(trace_to_dict(trace, scenario_name), indent=2, sort_keys=True) + "\n"


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "xrorch-out"))


def write_trace(trace: Trace, out_dir=None, format: str = "all", scenario_name: str = "") -> list[Path]:
    """Write ``candidates.csv`` + ``summary.csv`` (csv), ``report.json`` (json), or all three."""
    if format not in ("csv", "json", "all"):
        raise ValueError(f"unknown trace format {format!r}")
    out = Path(out_dir) if out_dir is not None else default_output_dir()
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if format in ("csv", "all"):
        for name, cols, rows in (("candidates.csv", CANDIDATE_COLUMNS, candidate_rows(trace)),
                                 ("summary.csv", SUMMARY_COLUMNS, summary_rows(trace))):
            p = out / name
            p.write_bytes(_csv_text(cols, rows).encode("utf-8"))
            written.append(p)
    if format in ("json", "all"):
        p = out / "report.json"
        p.write_bytes(trace_json(trace, scenario_name).encode("utf-8"))
        written.append(p)
    return written
