"""Placement cost, its normaliser, and rescheduling overhead."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .model import ConfigurationError, NodeSpec, ResourceVector, Topology, UserProfile

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CostBreakdown:
    compute_cost: float
    energy_cost: float

    @property
    def total(self) -> float:
        return self.compute_cost + self.energy_cost


class OverheadMode(str, enum.Enum):
    FIXED_CONSTANTS = "FixedConstants"
    TIME_BASED = "TimeBased"


@dataclass(frozen=True)
class OverheadModel:
    """Scaling/migration overhead constants and the normaliser for their sum.

    ``tier_overrides`` maps ``"<from-tier>-><to-tier>"`` (e.g.
    ``"Edge->DataCenter"``) to a migration overhead replacing the default
    constant for that move.  Unused unless populated.
    """

    scaling_overhead: float = 0.5
    migration_overhead: float = 1.0
    ro_normalizer: float | None = None
    mode: OverheadMode = OverheadMode.FIXED_CONSTANTS
    tier_overrides: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.scaling_overhead < 0 or self.migration_overhead < 0:
            raise ConfigurationError("overhead constants must be >= 0")
        if any(v < 0 for v in self.tier_overrides.values()):
            raise ConfigurationError("tier override overheads must be >= 0")
        if self.ro_normalizer is None:
            object.__setattr__(self, "ro_normalizer", self.scaling_overhead + self.migration_overhead)
        if not self.ro_normalizer > 0:
            raise ConfigurationError("ro_normalizer must be > 0")


def node_cost(node: NodeSpec, assigned_users: Iterable[UserProfile]) -> CostBreakdown:
    demand = ResourceVector.total(u.r_usage for u in assigned_users)
    return CostBreakdown(node.price.dot(demand), node.tariff * node.energy_rate)


def _users_by_node(placement, users: Iterable[UserProfile]) -> dict[str, list[UserProfile]]:
    by_node = {n: [] for n in placement.node_set}
    for u in users:
        n = placement.serving_node(u.id)
        if n not in by_node:
            raise ConfigurationError(
                f"placement {placement.id} assigns user {u.id} to node {n!r} outside its node set")
        by_node[n].append(u)
    return by_node


def placement_cost(placement, users: Iterable[UserProfile], topo: Topology) -> float:
    """Sum of node costs over the placement's node set (currency/hour)."""
    by_node = _users_by_node(placement, users)
    return sum(node_cost(topo.nodes[n], members).total for n, members in by_node.items())


def placement_cost_max(placement, users: Iterable[UserProfile], topo: Topology) -> float:
    """Cost if every user consumed its serving node's full capacity.

    Grows linearly with the number of users even on a single node.
    """
    by_node = _users_by_node(placement, users)
    n_users = sum(len(m) for m in by_node.values())
    if n_users == 0:
        raise ConfigurationError("placement cost normaliser is undefined with zero users")
    total = 0.0
    for n, members in by_node.items():
        node = topo.nodes[n]
        total += len(members) * node.price.dot(node.r_max) + node.tariff * node.energy_rate
    if not total > 0:
        raise ConfigurationError(f"placement {placement.id} has a non-positive cost normaliser")
    return total


def normalized_placement_cost(cost: float, cost_max: float) -> float:
    if not cost_max > 0:
        raise ConfigurationError("cost_max must be > 0")
    ratio = cost / cost_max
    if ratio > 1.0:
        logger.warning("placement cost %.6f exceeds its normaliser %.6f; clamping to 1", cost, cost_max)
        return 1.0
    if ratio < 0.0:
        logger.warning("placement cost %.6f is negative (energy reward); clamping to 0", cost)
        return 0.0
    return ratio


def _tier_of(placement, topo: Topology | None):
    if placement is None or topo is None:
        return None
    tiers = {topo.nodes[n].tier.value for n in placement.node_set if n in topo.nodes}
    return tiers.pop() if len(tiers) == 1 else None


def _time_factor(candidate, topo: Topology | None, l_max: float | None) -> float:
    if topo is None or not l_max:
        raise ConfigurationError("TimeBased overhead needs the topology and the tightest l_max")
    t_action = max(topo.nodes[n].t_action for n in candidate.node_set)
    return 1000.0 * t_action / l_max


def overhead_terms(candidate, current, needs_scaling: bool, model: OverheadModel, *,
                   topo: Topology | None = None, l_max: float | None = None) -> tuple[float, float]:
    """The separate ``(S_OH, M_OH)`` terms for moving to ``candidate``."""
    s_oh = model.scaling_overhead if needs_scaling else 0.0
    m_oh = 0.0
    if current is None or candidate.id != current.id:
        m_oh = model.migration_overhead
        if model.tier_overrides:
            src, dst = _tier_of(current, topo), _tier_of(candidate, topo)
            m_oh = model.tier_overrides.get(f"{src}->{dst}", m_oh)
    if model.mode is OverheadMode.TIME_BASED:
        factor = _time_factor(candidate, topo, l_max)
        s_oh *= factor
        m_oh *= factor
    return s_oh, m_oh


def rescheduling_overhead(candidate, current, needs_scaling: bool, model: OverheadModel, *,
                          topo: Topology | None = None, l_max: float | None = None) -> tuple[float, float]:
    """Return ``(Cost_RO, normalised Cost_RO)`` for moving to ``candidate``.

    A ``current`` of None (first deployment) counts as a migration.  In
    TimeBased mode both overheads are multiplied by the candidate's
    actuation time (s) relative to the tightest latency budget ``l_max`` (ms).
    """
    s_oh, m_oh = overhead_terms(candidate, current, needs_scaling, model, topo=topo, l_max=l_max)
    cost = s_oh + m_oh
    return cost, min(1.0, max(0.0, cost / model.ro_normalizer))
