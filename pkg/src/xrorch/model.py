"""
Domain vocabulary for multi-user XR services on an edge-cloud continuum.

Holds the node, link, topology and user types plus the per-user quantities
derived from them: engagement level, user weight, latency, throughput
demand and per-user QoS.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import networkx as nx


class ConfigurationError(ValueError):
    """Raised when scenario data is inconsistent or incomplete."""


class _Unreachable:
    """Latency of a path that does not exist.

    Absorbing under addition, compares greater than every number and
    converts to ``inf``.  Kept distinct from a large finite latency so the
    QoS and constraint layers can tell "slow" apart from "unreachable".
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNREACHABLE"

    def __float__(self):
        return math.inf

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()


def is_unreachable(value) -> bool:
    return value is UNREACHABLE


class Tier(str, enum.Enum):
    DATA_CENTER = "DataCenter"
    EDGE = "Edge"


class Access(str, enum.Enum):
    CLOSED = "Closed"
    OPEN = "Open"


class Interface(str, enum.Enum):
    WIRELESS = "Wireless"
    WIRED = "Wired"


class Role(str, enum.Enum):
    PARTICIPANT = "Participant"
    PRODUCER = "Producer"
    AUDIENCE = "Audience"
    MODERATOR = "Moderator"


class Interaction(str, enum.Enum):
    N_TO_M = "NtoM"
    ONE_TO_N = "OneToN"
    NONE = "None"


class Perception(str, enum.Enum):
    POINT_CLOUD = "PointCloud"
    AVATAR_3D = "Avatar3D"
    NONE = "None"


class DistributionMode(str, enum.Enum):
    FULLY_DISTRIBUTED = "FullyDistributed"
    PARTIALLY_DISTRIBUTED = "PartiallyDistributed"


class Processing(str, enum.Enum):
    CENTRALISED = "Centralised"
    DISTRIBUTED = "Distributed"


RESOURCE_FIELDS = ("vcpu", "ram", "gpu")


@dataclass(frozen=True)
class ResourceVector:
    """vCPU cores, RAM in GB and accelerator units."""

    vcpu: float = 0.0
    ram: float = 0.0
    gpu: float = 0.0

    def __post_init__(self):
        for name in RESOURCE_FIELDS:
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"resource component {name} must be finite and >= 0, got {value}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.vcpu, self.ram, self.gpu)

    def __add__(self, other: ResourceVector) -> ResourceVector:
        return ResourceVector(self.vcpu + other.vcpu, self.ram + other.ram, self.gpu + other.gpu)

    def __le__(self, other: ResourceVector) -> bool:
        return all(a <= b for a, b in zip(self.as_tuple(), other.as_tuple()))

    def exceeds_any(self, other: ResourceVector) -> bool:
        """True if some component is strictly greater than in ``other``."""
        return any(a > b for a, b in zip(self.as_tuple(), other.as_tuple()))

    def scale(self, factor: float) -> ResourceVector:
        return ResourceVector(self.vcpu * factor, self.ram * factor, self.gpu * factor)

    def maximum(self, other: ResourceVector) -> ResourceVector:
        return ResourceVector(*(max(a, b) for a, b in zip(self.as_tuple(), other.as_tuple())))

    def minimum(self, other: ResourceVector) -> ResourceVector:
        return ResourceVector(*(min(a, b) for a, b in zip(self.as_tuple(), other.as_tuple())))

    def dot(self, other: ResourceVector) -> float:
        return sum(a * b for a, b in zip(self.as_tuple(), other.as_tuple()))

    @classmethod
    def total(cls, vectors) -> ResourceVector:
        acc = cls()
        for v in vectors:
            acc = acc + v
        return acc


@dataclass(frozen=True)
class NodeSpec:
    """A compute node. ``price`` is currency per unit-hour for each resource component."""

    id: str
    tier: Tier
    r_max: ResourceVector
    r_assigned: ResourceVector
    price: ResourceVector
    energy_rate: float = 0.0
    tariff: float = 0.0
    scalable: bool = True
    t_action: float = 0.0
    access: Access = Access.OPEN
    region: str = ""
    domain: str = ""

    def __post_init__(self):
        if not self.r_assigned <= self.r_max:
            raise ValueError(f"node {self.id}: r_assigned {self.r_assigned} exceeds r_max {self.r_max}")
        if self.t_action < 0:
            raise ValueError(f"node {self.id}: t_action must be >= 0")
        if self.energy_rate < 0:
            raise ValueError(f"node {self.id}: energy_rate must be >= 0")


@dataclass(frozen=True)
class Link:
    endpoint_a: str
    endpoint_b: str
    latency: float
    interface: Interface = Interface.WIRED
    capacity: float | None = None

    def __post_init__(self):
        if self.endpoint_a == self.endpoint_b:
            raise ValueError(f"link endpoints must differ, got {self.endpoint_a!r} twice")
        if not self.latency >= 0:
            raise ValueError(f"link {self.endpoint_a}-{self.endpoint_b}: latency must be >= 0")

    @property
    def key(self) -> frozenset:
        return frozenset((self.endpoint_a, self.endpoint_b))


@dataclass(frozen=True)
class Topology:
    """Compute nodes, a static latency graph and the UE attachment points."""

    nodes: Mapping[str, NodeSpec]
    links: tuple[Link, ...] = ()
    ue_attachments: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for ue, node in self.ue_attachments.items():
            if node not in self.nodes:
                raise ConfigurationError(f"UE {ue} attaches to unknown node {node!r}")

    @property
    def node_ids(self) -> list[str]:
        return sorted(self.nodes)

    @cached_property
    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        for link in self.links:
            a, b = link.endpoint_a, link.endpoint_b
            # parallel links collapse to the fastest one
            if g.has_edge(a, b) and g[a][b]["latency"] <= link.latency:
                continue
            g.add_edge(a, b, latency=link.latency)
        return g

    @cached_property
    def _distances(self) -> dict:
        return {}

    def latencies_from(self, source: str) -> dict[str, float]:
        cache = self._distances
        if source not in cache:
            if source in self.graph:
                cache[source] = nx.single_source_dijkstra_path_length(self.graph, source, weight="latency")
            else:
                cache[source] = {source: 0.0}
        return cache[source]

    def source_for(self, ue: str) -> str:
        """Graph vertex a UE's traffic starts from: the UE itself when it has links, else its attachment node."""
        if ue in self.graph:
            return ue
        try:
            return self.ue_attachments[ue]
        except KeyError:
            raise ConfigurationError(f"UE {ue!r} is not attached in the topology") from None

    def with_node(self, node: NodeSpec) -> Topology:
        nodes = dict(self.nodes)
        nodes[node.id] = node
        return Topology(nodes, self.links, self.ue_attachments)

    def with_link_latency(self, a: str, b: str, latency: float) -> Topology:
        key = frozenset((a, b))
        links = []
        found = False
        for link in self.links:
            if link.key == key:
                link = Link(link.endpoint_a, link.endpoint_b, latency, link.interface, link.capacity)
                found = True
            links.append(link)
        if not found:
            raise ConfigurationError(f"no link between {a!r} and {b!r}")
        return Topology(self.nodes, tuple(links), self.ue_attachments)

    def with_attachment(self, ue: str, node: str) -> Topology:
        attachments = dict(self.ue_attachments)
        attachments[ue] = node
        return Topology(self.nodes, self.links, attachments)


@dataclass(frozen=True)
class ContentDescriptor:
    static_complexity: float = 0.0
    dynamic_complexity: float = 0.0
    fg_consistency: bool = False
    bg_consistency: bool = False

    def __post_init__(self):
        for value in (self.static_complexity, self.dynamic_complexity):
            if not math.isfinite(value) or value < 0:
                raise ValueError("content complexities must be finite and >= 0")


@dataclass(frozen=True)
class UserProfile:
    id: str
    role: Role
    interaction: Interaction
    self_perception: Perception
    quality_profile: str
    l_max: float
    l_proc: float
    r_usage: ResourceVector
    attachment: str
    others_perception: str | None = None
    th_min: float | None = None
    content: ContentDescriptor = field(default_factory=ContentDescriptor)
    prefs: float = 0.5

    def __post_init__(self):
        if not self.l_max > 0:
            raise ValueError(f"user {self.id}: l_max must be > 0")
        if not self.l_proc >= 0:
            raise ValueError(f"user {self.id}: l_proc must be >= 0")
        if not 0.0 <= self.prefs <= 1.0:
            raise ValueError(f"user {self.id}: prefs must lie in [0, 1]")
        if self.others_perception is None:
            object.__setattr__(self, "others_perception", _value(self.self_perception))


def _value(x) -> str:
    return x.value if isinstance(x, enum.Enum) else str(x)


# user attributes that optional extra score columns may read
_EXTRA_ATTRIBUTES = {
    "others_perception": lambda u: u.others_perception,
    "fg_consistency": lambda u: u.content.fg_consistency,
    "bg_consistency": lambda u: u.content.bg_consistency,
    "static_complexity": lambda u: u.content.static_complexity,
    "dynamic_complexity": lambda u: u.content.dynamic_complexity,
}


@dataclass(frozen=True)
class ExtraColumn:
    """An additional engagement factor.

    With ``scores`` set, the user's attribute value (stringified, booleans
    as ``"true"``/``"false"``) is looked up in it.  Without scores the
    attribute must be numeric and is clamped into [0, 1].
    """

    attribute: str
    weight: float
    scores: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.attribute not in _EXTRA_ATTRIBUTES:
            raise ConfigurationError(
                f"unknown engagement attribute {self.attribute!r}; expected one of {sorted(_EXTRA_ATTRIBUTES)}")

    def score(self, user: UserProfile) -> float:
        raw = _EXTRA_ATTRIBUTES[self.attribute](user)
        if self.scores is None:
            return min(1.0, max(0.0, float(raw)))
        key = str(raw).lower() if isinstance(raw, bool) else _value(raw)
        try:
            return self.scores[key]
        except KeyError:
            raise ConfigurationError(f"score table column {self.attribute!r} has no entry for {key!r}") from None


@dataclass(frozen=True)
class ScoreTable:
    """Lookup tables turning a user's context into an engagement level."""

    role_scores: Mapping[str, float]
    interaction_scores: Mapping[str, float]
    quality_scores: Mapping[str, float]
    perception_scores: Mapping[str, float]
    w_r: float = 0.25
    w_i: float = 0.25
    w_rq: float = 0.25
    w_ps: float = 0.25
    extra: tuple[ExtraColumn, ...] = ()

    def __post_init__(self):
        tables = {
            "role_scores": self.role_scores,
            "interaction_scores": self.interaction_scores,
            "quality_scores": self.quality_scores,
            "perception_scores": self.perception_scores,
        }
        for col in self.extra:
            if col.scores is not None:
                tables[f"extra.{col.attribute}"] = col.scores
        for name, table in tables.items():
            for key, score in table.items():
                if not 0.0 <= score <= 1.0:
                    raise ConfigurationError(f"{name}[{key}] = {score} is outside [0, 1]")
        weights = self.weights
        for name, w in weights.items():
            if not 0.0 <= w <= 1.0:
                raise ConfigurationError(f"weight {name} = {w} is outside [0, 1]")
        total = sum(weights.values())
        if abs(total - 1.0) > 1e-9:
            raise ConfigurationError(f"score table weights sum to {total}, expected 1")

    @property
    def weights(self) -> dict[str, float]:
        w = {"w_r": self.w_r, "w_i": self.w_i, "w_rq": self.w_rq, "w_ps": self.w_ps}
        for col in self.extra:
            w[f"w_{col.attribute}"] = col.weight
        return w


@dataclass(frozen=True)
class DeploymentMode:
    mode: DistributionMode = DistributionMode.PARTIALLY_DISTRIBUTED
    uol: float = 1.0
    processing: Processing = Processing.CENTRALISED

    def __post_init__(self):
        if not 0.0 <= self.uol <= 1.0:
            raise ValueError(f"uol must lie in [0, 1], got {self.uol}")


def _lookup(table: Mapping[str, float], key, column: str) -> float:
    k = _value(key)
    try:
        return table[k]
    except KeyError:
        raise ConfigurationError(f"score table {column} has no entry for {k!r}") from None


def compute_uel(user: UserProfile, table: ScoreTable) -> float:
    """User engagement level: weighted sum of the per-factor scores."""
    uel = (
        table.w_rq * _lookup(table.quality_scores, user.quality_profile, "quality_scores")
        + table.w_r * _lookup(table.role_scores, user.role, "role_scores")
        + table.w_i * _lookup(table.interaction_scores, user.interaction, "interaction_scores")
        + table.w_ps * _lookup(table.perception_scores, user.self_perception, "perception_scores")
    )
    for col in table.extra:
        uel += col.weight * col.score(user)
    # weights sum to 1 within 1e-9, so only rounding can push past the bounds
    return min(1.0, max(0.0, uel))


def neutral_pref_gain(prefs: float) -> float:
    return 1.0


def compute_weight(uel: float, mode: DeploymentMode | None = None, prefs: float = 0.5, *,
                   combiner: str = "uel", pref_gain: Callable[[float], float] = neutral_pref_gain) -> float:
    """Weight of a user in the placement QoS.

    ``combiner="uel"`` returns the engagement level unchanged.
    ``combiner="extended"`` returns ``uel * uol * pref_gain(prefs)`` clamped
    to [0, 1]; the default gain ignores preferences.
    """
    if combiner == "uel":
        return uel
    if combiner == "extended":
        uol = 1.0 if mode is None else mode.uol
        return min(1.0, max(0.0, uel * uol * pref_gain(prefs)))
    raise ConfigurationError(f"unknown weight combiner {combiner!r}")


def net_latency(topo: Topology, ue: str, node: str):
    """Shortest-path latency in ms from a UE to a node, or ``UNREACHABLE``."""
    if node not in topo.nodes:
        raise ConfigurationError(f"unknown node {node!r}")
    dist = topo.latencies_from(topo.source_for(ue))
    return dist.get(node, UNREACHABLE)


def user_latency(l_proc: float, l_net):
    return l_proc + l_net


def user_qos(l_u, l_max: float, th: float | None = None, th_min: float | None = None) -> float:
    if is_unreachable(l_u):
        return 0.0
    q = max(0.0, 1.0 - l_u / l_max)
    if th is not None and th_min:
        q = min(q, min(1.0, th / th_min))
    return q


def throughput_demand(user: UserProfile, table: Mapping[str, float] | None = None) -> float:
    """Bitrate in Mbps for the user's quality profile; 0 without a table."""
    if not table:
        return 0.0
    return float(table.get(user.quality_profile, 0.0))
