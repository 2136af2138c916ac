"""
The five placement constraints and their conversion into verdicts.

Each check returns a :class:`Check`; :func:`evaluate` runs them in the
fixed order QoSC, PCC, RAC, SOC, MOC and applies the strictness policy:
a failing Hard constraint discards the placement, a failing Soft
constraint adds its penalty, an Off constraint is reported but ignored.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .costs import OverheadModel, overhead_terms, placement_cost
from .model import (ConfigurationError, ResourceVector, Topology, UserProfile, is_unreachable,
                    net_latency, throughput_demand, user_latency)

CONSTRAINT_ORDER = ("QoSC", "PCC", "RAC", "SOC", "MOC")

INF = math.inf


class Strictness(str, enum.Enum):
    HARD = "Hard"
    SOFT = "Soft"
    OFF = "Off"


@dataclass(frozen=True)
class Enforcement:
    kind: Strictness = Strictness.HARD
    penalty: float = 0.0

    def __post_init__(self):
        if self.penalty < 0:
            raise ConfigurationError("soft penalties must be >= 0")

    @classmethod
    def soft(cls, penalty: float) -> Enforcement:
        return cls(Strictness.SOFT, penalty)


HARD = Enforcement(Strictness.HARD)
OFF = Enforcement(Strictness.OFF)


@dataclass(frozen=True)
class ConstraintPolicy:
    strictness: Mapping[str, Enforcement] = field(default_factory=lambda: {c: HARD for c in CONSTRAINT_ORDER})
    c_opex: float = INF
    c_capex: float = INF
    capex_rate: ResourceVector = ResourceVector()
    s_oh_max: float = INF
    m_oh_max: float = INF
    # multiply each user's demand by (static + dynamic content complexity)
    content_multiplier: bool = False

    def __post_init__(self):
        unknown = set(self.strictness) - set(CONSTRAINT_ORDER)
        if unknown:
            raise ConfigurationError(f"unknown constraints in policy: {sorted(unknown)}")
        full = {c: self.strictness.get(c, HARD) for c in CONSTRAINT_ORDER}
        object.__setattr__(self, "strictness", full)
        for name in ("c_opex", "c_capex"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be > 0 or inf")
        for name in ("s_oh_max", "m_oh_max"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")


@dataclass(frozen=True)
class Check:
    satisfied: bool
    margin: float
    detail: str = ""


@dataclass(frozen=True)
class QoscCheck(Check):
    latencies: Mapping[str, object] = field(default_factory=dict)
    violators: tuple[str, ...] = ()


@dataclass(frozen=True)
class RacCheck(Check):
    demand: Mapping[str, ResourceVector] = field(default_factory=dict)
    needs_scaling: bool = False
    # node id -> demand, for nodes whose assignment is short of demand
    scaling_targets: Mapping[str, ResourceVector] = field(default_factory=dict)


@dataclass(frozen=True)
class SocCheck(Check):
    scalable_nodes: int = 0
    s_oh: float = 0.0


@dataclass(frozen=True)
class MocCheck(Check):
    m_oh: float = 0.0


class VerdictStatus(str, enum.Enum):
    PASS = "Pass"
    DISCARD = "Discard"
    PENALIZE = "Penalize"


@dataclass(frozen=True)
class Verdict:
    status: VerdictStatus
    per_constraint: Mapping[str, Check]
    total_penalty: float = 0.0
    reason: str = ""

    @property
    def discarded(self) -> bool:
        return self.status is VerdictStatus.DISCARD

    @property
    def rac(self) -> RacCheck:
        return self.per_constraint["RAC"]


def check_qosc(candidate, users: Sequence[UserProfile], topo: Topology,
               throughput_table: Mapping[str, float] | None = None) -> QoscCheck:
    latencies = {}
    violators = []
    margin = INF
    for u in users:
        l_u = user_latency(u.l_proc, net_latency(topo, u.attachment, candidate.serving_node(u.id)))
        latencies[u.id] = l_u
        if is_unreachable(l_u):
            violators.append(u.id)
            margin = -INF
            continue
        ok = l_u <= u.l_max
        if u.th_min is not None and throughput_table:
            ok = ok and throughput_demand(u, throughput_table) >= u.th_min
        if not ok:
            violators.append(u.id)
        margin = min(margin, (u.l_max - l_u) / u.l_max)
    if not users:
        margin = 1.0
    detail = ""
    if violators:
        unreachable = [v for v in violators if is_unreachable(latencies[v])]
        detail = "QoS bound violated for " + ", ".join(violators)
        if unreachable:
            detail += " (unreachable: " + ", ".join(unreachable) + ")"
    return QoscCheck(not violators, margin, detail, latencies, tuple(violators))


def check_pcc(candidate_cost: float, policy: ConstraintPolicy) -> Check:
    if math.isinf(policy.c_opex):
        return Check(True, 1.0)
    ok = candidate_cost <= policy.c_opex
    margin = (policy.c_opex - candidate_cost) / policy.c_opex
    detail = "" if ok else f"cost {candidate_cost:.4f} exceeds opex budget {policy.c_opex:.4f}"
    return Check(ok, margin, detail)


def node_demand(candidate, users: Sequence[UserProfile], policy: ConstraintPolicy) -> dict[str, ResourceVector]:
    demand = {n: ResourceVector() for n in candidate.node_set}
    for u in users:
        usage = u.r_usage
        if policy.content_multiplier:
            usage = usage.scale(u.content.static_complexity + u.content.dynamic_complexity)
        n = candidate.serving_node(u.id)
        demand[n] = demand[n] + usage
    return demand


def _capacity_margin(demand: ResourceVector, r_max: ResourceVector) -> float:
    margins = []
    for d, m in zip(demand.as_tuple(), r_max.as_tuple()):
        if m > 0:
            margins.append((m - d) / m)
        elif d > 0:
            margins.append(-INF)
    return min(margins, default=1.0)


def check_rac(candidate, users: Sequence[UserProfile], topo: Topology, policy: ConstraintPolicy) -> RacCheck:
    demand = node_demand(candidate, users, policy)
    over = []
    targets = {}
    margin = INF
    for n in sorted(demand):
        node = topo.nodes[n]
        d = demand[n]
        margin = min(margin, _capacity_margin(d, node.r_max))
        if not d <= node.r_max:
            over.append(f"{n} demand {_fmt(d)} > r_max {_fmt(node.r_max)}")
        # scaling never goes past capacity, even when RAC is only soft-enforced
        target = d.minimum(node.r_max)
        if target.exceeds_any(node.r_assigned):
            targets[n] = target
    r_max_pop = ResourceVector.total(topo.nodes[n].r_max for n in candidate.node_set)
    capex = policy.capex_rate.dot(r_max_pop)
    capex_ok = capex <= policy.c_capex
    if not capex_ok:
        over.append(f"capex {capex:.4f} exceeds budget {policy.c_capex:.4f}")
    return RacCheck(not over, margin, "; ".join(over), demand,
                    needs_scaling=bool(targets), scaling_targets=targets)


def check_soc(candidate, rac: RacCheck, topo: Topology, overhead: OverheadModel, policy: ConstraintPolicy,
              current=None, l_max: float | None = None) -> SocCheck:
    s_g = sum(1 for n in topo.nodes.values() if n.scalable)
    if not rac.needs_scaling:
        return SocCheck(True, 1.0, "", s_g, 0.0)
    s_oh, _ = overhead_terms(candidate, current, True, overhead, topo=topo, l_max=l_max)
    stuck = [n for n in sorted(rac.scaling_targets) if not topo.nodes[n].scalable]
    problems = []
    if stuck:
        problems.append("cannot scale " + ", ".join(stuck))
    if s_oh > policy.s_oh_max:
        problems.append(f"scaling overhead {s_oh:.4f} > {policy.s_oh_max:.4f}")
    margin = 1.0 if math.isinf(policy.s_oh_max) else policy.s_oh_max - s_oh
    if stuck:
        margin = -INF
    return SocCheck(not problems, margin, "; ".join(problems), s_g, s_oh)


def check_moc(candidate, current, overhead: OverheadModel, policy: ConstraintPolicy,
              topo: Topology | None = None, l_max: float | None = None) -> MocCheck:
    _, m_oh = overhead_terms(candidate, current, False, overhead, topo=topo, l_max=l_max)
    ok = m_oh <= policy.m_oh_max
    margin = 1.0 if math.isinf(policy.m_oh_max) else policy.m_oh_max - m_oh
    detail = "" if ok else f"migration overhead {m_oh:.4f} > {policy.m_oh_max:.4f}"
    return MocCheck(ok, margin, detail, m_oh)


def evaluate(candidate, state) -> Verdict:
    """Run all five checks for ``candidate`` against an orchestrator state.

    ``state`` needs ``users``, ``topology``, ``current``, ``policy``,
    ``overhead`` and ``throughput_table`` attributes.
    """
    users, topo, policy = state.users, state.topology, state.policy
    l_max = min((u.l_max for u in users), default=None)
    rac = check_rac(candidate, users, topo, policy)
    checks = {
        "QoSC": check_qosc(candidate, users, topo, state.throughput_table),
        "PCC": check_pcc(placement_cost(candidate, users, topo), policy),
        "RAC": rac,
        "SOC": check_soc(candidate, rac, topo, state.overhead, policy, state.current, l_max),
        "MOC": check_moc(candidate, state.current, state.overhead, policy, topo, l_max),
    }
    penalty = 0.0
    soft_failures = []
    for name in CONSTRAINT_ORDER:
        check = checks[name]
        rule = policy.strictness[name]
        if check.satisfied or rule.kind is Strictness.OFF:
            continue
        if rule.kind is Strictness.HARD:
            return Verdict(VerdictStatus.DISCARD, checks, 0.0, f"{name}: {check.detail}")
        penalty += rule.penalty
        soft_failures.append(name)
    if soft_failures:
        return Verdict(VerdictStatus.PENALIZE, checks, penalty, "soft: " + ", ".join(soft_failures))
    return Verdict(VerdictStatus.PASS, checks)


def _fmt(v: ResourceVector) -> str:
    parts = [f"{v.vcpu:g} vCPU", f"{v.ram:g} GB"]
    if v.gpu:
        parts.append(f"{v.gpu:g} GPU")
    return "/".join(parts)
