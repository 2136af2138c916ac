"""
Placement search, rescheduling decision and the event-driven control loop.

Each context event (user joins or leaves, node resources change, link
latency changes) triggers one pass of the loop:

1. score every candidate placement and pick the best one,
2. decide between None / Scaling / Migration / ScalingAndMigration and
   apply it,
3. keep executing until the next event.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .constraints import ConstraintPolicy, Verdict, evaluate
from .costs import (OverheadModel, normalized_placement_cost, placement_cost, placement_cost_max,
                    rescheduling_overhead)
from .model import (ConfigurationError, DeploymentMode, ResourceVector, ScoreTable, Topology,
                    UserProfile, compute_uel, compute_weight, throughput_demand, user_qos)

logger = logging.getLogger(__name__)

# relative tolerance under which two objective values count as tied
TIE_RTOL = 1e-9


@dataclass(frozen=True)
class Placement:
    """A serving node set plus the rule mapping users onto it.

    With ``explicit`` empty every user goes to the single node in
    ``node_set``.  Otherwise users listed in ``explicit`` go to their
    mapped node and unlisted users go to ``node_set[0]``.
    """

    id: str
    node_set: tuple[str, ...]
    explicit: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.node_set:
            raise ConfigurationError(f"placement {self.id} has an empty node set")
        if len(set(self.node_set)) != len(self.node_set):
            raise ConfigurationError(f"placement {self.id} lists a node twice")
        if not self.explicit and len(self.node_set) != 1:
            raise ConfigurationError(f"placement {self.id}: single-node assignment needs exactly one node")
        for user, node in self.explicit.items():
            if node not in self.node_set:
                raise ConfigurationError(f"placement {self.id} maps {user} to {node}, outside its node set")

    @classmethod
    def single(cls, id: str, node: str) -> Placement:
        return cls(id, (node,))

    @property
    def pop(self) -> int:
        return len(self.node_set)

    def serving_node(self, user_id: str) -> str:
        return self.explicit.get(user_id, self.node_set[0])


@dataclass(frozen=True)
class TradeoffVector:
    """Weights for QoS, placement cost and rescheduling overhead."""

    alpha: float = 1.0
    beta: float = 0.1
    lam: float = 0.05

    def __post_init__(self):
        vals = (self.alpha, self.beta, self.lam)
        if any(v < 0 or not math.isfinite(v) for v in vals):
            raise ConfigurationError("trade-off weights must be finite and >= 0")
        if not any(vals):
            raise ConfigurationError("trade-off weights must not all be zero")

    def scaled(self, c: float) -> TradeoffVector:
        return TradeoffVector(self.alpha * c, self.beta * c, self.lam * c)


class ReschedulingOp(str, enum.Enum):
    NONE = "None"
    SCALING = "Scaling"
    MIGRATION = "Migration"
    SCALING_AND_MIGRATION = "ScalingAndMigration"


# ---- context events -------------------------------------------------------

@dataclass(frozen=True)
class UserJoined:
    profile: UserProfile

    def summary(self) -> str:
        return f"{self.profile.id} added"


@dataclass(frozen=True)
class UserLeft:
    user_id: str

    def summary(self) -> str:
        return f"{self.user_id} removed"


@dataclass(frozen=True)
class NodeResourcesChanged:
    node_id: str
    r_assigned: ResourceVector | None = None
    r_max: ResourceVector | None = None

    def summary(self) -> str:
        parts = []
        if self.r_max is not None:
            parts.append(f"r_max={self.r_max.vcpu:g}vCPU/{self.r_max.ram:g}GB")
        if self.r_assigned is not None:
            parts.append(f"r_assigned={self.r_assigned.vcpu:g}vCPU/{self.r_assigned.ram:g}GB")
        return f"{self.node_id} resources changed ({', '.join(parts)})"


@dataclass(frozen=True)
class LinkLatencyChanged:
    endpoint_a: str
    endpoint_b: str
    latency: float

    def summary(self) -> str:
        return f"link {self.endpoint_a}-{self.endpoint_b} latency {self.latency:g} ms"


ContextEvent = UserJoined | UserLeft | NodeResourcesChanged | LinkLatencyChanged


class EventError(ConfigurationError):
    """An event references something that does not exist in the current state."""


class NoFeasiblePlacement(RuntimeError):
    def __init__(self, reasons: Mapping[str, str]):
        self.reasons = dict(reasons)
        detail = "; ".join(f"{pid}: {r}" for pid, r in self.reasons.items())
        super().__init__(f"every candidate placement was discarded ({detail})")


# ---- state and reports ------------------------------------------------------

@dataclass(frozen=True)
class OrchestratorState:
    topology: Topology
    score_table: ScoreTable
    users: tuple[UserProfile, ...] = ()
    current: Placement | None = None
    tradeoffs: TradeoffVector = TradeoffVector()
    policy: ConstraintPolicy = ConstraintPolicy()
    overhead: OverheadModel = OverheadModel()
    deployment: DeploymentMode = DeploymentMode()
    weight_combiner: str = "uel"
    throughput_table: Mapping[str, float] | None = None
    explicit_placements: tuple[Placement, ...] = ()
    step: int = 0

    def user_weight(self, user: UserProfile) -> float:
        uel = compute_uel(user, self.score_table)
        return compute_weight(uel, self.deployment, user.prefs, combiner=self.weight_combiner)

    def digest(self) -> dict:
        return {
            "step": self.step,
            "users": [u.id for u in self.users],
            "j_current": None if self.current is None else self.current.id,
            "r_assigned": {n: dataclasses.asdict(self.topology.nodes[n].r_assigned)
                           for n in self.topology.node_ids},
        }


@dataclass(frozen=True)
class UserTerm:
    user_id: str
    weight: float
    latency: float
    qos: float


@dataclass(frozen=True)
class CandidateScore:
    placement_id: str
    qos_norm: float
    cost_norm: float
    ro_norm: float
    penalty: float
    f: float | None
    verdict: Verdict
    needs_scaling: bool
    cost: float = 0.0
    cost_max: float = 0.0
    ro_cost: float = 0.0
    user_terms: tuple[UserTerm, ...] = ()

    @property
    def discarded(self) -> bool:
        return self.verdict.discarded


@dataclass
class StepReport:
    step: int
    event: str
    scores: list[CandidateScore]
    j_current: str | None
    j_best: str | None
    f_best: float | None
    op: ReschedulingOp
    deltas: dict[str, tuple[ResourceVector, ResourceVector]]
    digest: dict
    degraded: bool = False
    parked: bool = False
    error: str = ""


@dataclass
class Trace:
    reports: list[StepReport] = field(default_factory=list)
    errors: list[tuple[int, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)

    def __getitem__(self, i):
        return self.reports[i]


# ---- algorithm pieces -------------------------------------------------------

def enumerate_candidates(state: OrchestratorState) -> list[Placement]:
    """One single-node placement per compute node (PL1..PLn in node-id order), then explicit ones."""
    node_ids = state.topology.node_ids
    if not node_ids:
        raise ConfigurationError("topology has no compute nodes")
    candidates = [Placement.single(f"PL{i}", n) for i, n in enumerate(node_ids, start=1)]
    return candidates + list(state.explicit_placements)


def score_candidate(candidate: Placement, state: OrchestratorState) -> CandidateScore:
    users = state.users
    if not users:
        raise ConfigurationError("cannot score a placement for an empty service")
    verdict = evaluate(candidate, state)
    latencies = verdict.per_constraint["QoSC"].latencies

    terms = []
    qos_sum = 0.0
    for u in users:
        w = state.user_weight(u)
        th = throughput_demand(u, state.throughput_table) if state.throughput_table else None
        q = user_qos(latencies[u.id], u.l_max, th, u.th_min)
        terms.append(UserTerm(u.id, w, float(latencies[u.id]), q))
        qos_sum += w * q
    qos_norm = qos_sum / len(users)

    cost = placement_cost(candidate, users, state.topology)
    cost_max = placement_cost_max(candidate, users, state.topology)
    if verdict.discarded:
        # over-capacity demand on a discarded candidate is expected, no diagnostic
        cost_norm = min(1.0, max(0.0, cost / cost_max))
    else:
        cost_norm = normalized_placement_cost(cost, cost_max)

    needs_scaling = verdict.rac.needs_scaling
    l_max = min(u.l_max for u in users)
    ro_cost, ro_norm = rescheduling_overhead(candidate, state.current, needs_scaling, state.overhead,
                                             topo=state.topology, l_max=l_max)
    h = state.tradeoffs
    f = None
    if not verdict.discarded:
        f = h.alpha * qos_norm - h.beta * cost_norm - h.lam * ro_norm - verdict.total_penalty
    return CandidateScore(candidate.id, qos_norm, cost_norm, ro_norm, verdict.total_penalty, f, verdict,
                          needs_scaling, cost, cost_max, ro_cost, tuple(terms))


def _tied(a: float, b: float, scale: float) -> bool:
    return abs(a - b) <= TIE_RTOL * max(abs(a), abs(b), scale)


def select_best(scores: Sequence[CandidateScore], current_id: str | None, scale: float = 1.0) -> CandidateScore:
    """Argmax of f over kept candidates; ties go to the incumbent, then to the lowest id."""
    kept = [s for s in scores if not s.discarded]
    if not kept:
        raise NoFeasiblePlacement({s.placement_id: s.verdict.reason for s in scores})
    top = max(s.f for s in kept)
    tied = [s for s in kept if _tied(s.f, top, scale)]
    for s in tied:
        if s.placement_id == current_id:
            return s
    return min(tied, key=lambda s: _id_key(s.placement_id))


def _id_key(pid: str):
    # PL2 sorts before PL10
    head = pid.rstrip("0123456789")
    tail = pid[len(head):]
    return (head, int(tail) if tail else -1, pid)


def find_best_placement(state: OrchestratorState):
    """Return ``(j_best, f_best, scores)``; raise NoFeasiblePlacement if nothing survives."""
    candidates = enumerate_candidates(state)
    scores = [score_candidate(c, state) for c in candidates]
    h = state.tradeoffs
    current_id = None if state.current is None else state.current.id
    best = select_best(scores, current_id, scale=h.alpha + h.beta + h.lam)
    j_best = next(c for c in candidates if c.id == best.placement_id)
    return j_best, best.f, scores


def decide_rescheduling(j_best: Placement, j_current: Placement | None, rac_ok: bool) -> ReschedulingOp:
    """``rac_ok`` is True when the best placement's current assignment covers its demand."""
    same = j_current is not None and j_best.id == j_current.id
    if same:
        return ReschedulingOp.NONE if rac_ok else ReschedulingOp.SCALING
    return ReschedulingOp.MIGRATION if rac_ok else ReschedulingOp.SCALING_AND_MIGRATION


def apply_rescheduling(state: OrchestratorState, op: ReschedulingOp, j_best: Placement,
                       scaling_targets: Mapping[str, ResourceVector] | None = None):
    """Return ``(new_state, deltas)``; deltas map node id to ``(old, new)`` assignment."""
    deltas = {}
    topo = state.topology
    if op in (ReschedulingOp.SCALING, ReschedulingOp.SCALING_AND_MIGRATION):
        for n in sorted(scaling_targets or {}):
            node = topo.nodes[n]
            target = scaling_targets[n]
            if not target <= node.r_max:
                raise ValueError(f"cannot scale {n} beyond r_max: {target} > {node.r_max}")
            new = node.r_assigned.maximum(target)
            if new != node.r_assigned:
                deltas[n] = (node.r_assigned, new)
                topo = topo.with_node(dataclasses.replace(node, r_assigned=new))
    current = state.current
    if op in (ReschedulingOp.MIGRATION, ReschedulingOp.SCALING_AND_MIGRATION):
        current = j_best
    if op is ReschedulingOp.NONE:
        return state, deltas
    return dataclasses.replace(state, topology=topo, current=current), deltas


def apply_event(state: OrchestratorState, event) -> OrchestratorState:
    topo = state.topology
    if isinstance(event, UserJoined):
        u = event.profile
        if any(x.id == u.id for x in state.users):
            raise EventError(f"user {u.id} is already active")
        topo.source_for(u.attachment)
        return dataclasses.replace(state, users=state.users + (u,))
    if isinstance(event, UserLeft):
        if not any(x.id == event.user_id for x in state.users):
            raise EventError(f"user {event.user_id} is not active")
        return dataclasses.replace(state, users=tuple(u for u in state.users if u.id != event.user_id))
    if isinstance(event, NodeResourcesChanged):
        if event.node_id not in topo.nodes:
            raise EventError(f"unknown node {event.node_id}")
        node = topo.nodes[event.node_id]
        r_max = event.r_max if event.r_max is not None else node.r_max
        r_assigned = event.r_assigned if event.r_assigned is not None else node.r_assigned
        # a shrinking capacity also shrinks what is provisioned
        r_assigned = r_assigned.minimum(r_max)
        node = dataclasses.replace(node, r_max=r_max, r_assigned=r_assigned)
        return dataclasses.replace(state, topology=topo.with_node(node))
    if isinstance(event, LinkLatencyChanged):
        try:
            topo = topo.with_link_latency(event.endpoint_a, event.endpoint_b, event.latency)
        except ConfigurationError as exc:
            raise EventError(str(exc)) from None
        return dataclasses.replace(state, topology=topo)
    raise EventError(f"unsupported event {event!r}")


def step(state: OrchestratorState, event) -> tuple[OrchestratorState, StepReport]:
    """Apply one context event and run a full find-placement / reschedule pass."""
    state = apply_event(state, event)
    state = dataclasses.replace(state, step=state.step + 1)
    current_id = None if state.current is None else state.current.id
    if not state.users:
        return state, StepReport(state.step, event.summary(), [], current_id, None, None,
                                 ReschedulingOp.NONE, {}, state.digest(), parked=True)
    try:
        j_best, f_best, scores = find_best_placement(state)
    except NoFeasiblePlacement as exc:
        logger.warning("step %d: no feasible placement, staying on %s", state.step, current_id)
        scores = [score_candidate(c, state) for c in enumerate_candidates(state)]
        return state, StepReport(state.step, event.summary(), scores, current_id, None, None,
                                 ReschedulingOp.NONE, {}, state.digest(), degraded=True, error=str(exc))
    best = next(s for s in scores if s.placement_id == j_best.id)
    op = decide_rescheduling(j_best, state.current, not best.needs_scaling)
    state, deltas = apply_rescheduling(state, op, j_best, best.verdict.rac.scaling_targets)
    report = StepReport(state.step, event.summary(), scores, current_id, j_best.id, f_best, op, deltas,
                        state.digest())
    return state, report


def initial_state(scenario) -> OrchestratorState:
    return OrchestratorState(
        topology=scenario.topology,
        score_table=scenario.score_table,
        tradeoffs=scenario.tradeoffs,
        policy=scenario.policy,
        overhead=scenario.overhead,
        deployment=scenario.deployment,
        weight_combiner=scenario.weight_combiner,
        throughput_table=scenario.throughput_table,
        explicit_placements=tuple(scenario.placements),
    )


def run(scenario, *, until: int | None = None) -> Trace:
    """Fold :func:`step` over the scenario's events (optionally only the first ``until``)."""
    state = initial_state(scenario)
    trace = Trace()
    events = scenario.events if until is None else scenario.events[:until]
    for i, event in enumerate(events, start=1):
        try:
            state, report = step(state, event)
        except EventError as exc:
            logger.error("step %d: %s", i, exc)
            trace.errors.append((i, str(exc)))
            state = dataclasses.replace(state, step=state.step + 1)
            report = StepReport(state.step, _summary(event), [], None if state.current is None else state.current.id,
                                None, None, ReschedulingOp.NONE, {}, state.digest(), degraded=True, error=str(exc))
        trace.reports.append(report)
    return trace


def _summary(event) -> str:
    try:
        return event.summary()
    except AttributeError:
        return repr(event)
