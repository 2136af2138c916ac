"""Random but valid scenarios for property checks and experiments."""

from __future__ import annotations

import random

from .constraints import CONSTRAINT_ORDER, HARD, ConstraintPolicy, Enforcement
from .costs import OverheadModel
from .model import (Interaction, Interface, Link, NodeSpec, Perception, ResourceVector, Role, ScoreTable, Tier,
                    Topology, UserProfile)
from .orchestrator import LinkLatencyChanged, NodeResourcesChanged, TradeoffVector, UserJoined, UserLeft
from .scenario import Scenario

QUALITY_PROFILES = ("QP1", "QP2", "QP3")


def _rv(rng, vcpu_hi, ram_hi):
    return ResourceVector(float(rng.randint(0, vcpu_hi)), round(rng.uniform(0, ram_hi), 2))


def random_score_table(rng: random.Random) -> ScoreTable:
    raw = [rng.random() + 1e-3 for _ in range(4)]
    total = sum(raw)
    w = [x / total for x in raw]
    w[3] = 1.0 - w[0] - w[1] - w[2]
    return ScoreTable(
        role_scores={r.value: rng.random() for r in Role},
        interaction_scores={i.value: rng.random() for i in Interaction},
        quality_scores={q: rng.random() for q in QUALITY_PROFILES},
        perception_scores={p.value: rng.random() for p in Perception},
        w_r=w[0], w_i=w[1], w_rq=w[2], w_ps=max(0.0, w[3]),
    )


def random_scenario(rng: random.Random | int, *, max_nodes: int = 8, max_users: int = 12,
                    soft_penalties: bool = False, dynamic_events: bool = True) -> Scenario:
    """Build a connected topology with up to ``max_nodes`` nodes and a join/leave schedule.

    Node ids are zero-padded (``N01`` ...) so lexicographic order matches
    creation order.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    n_nodes = rng.randint(1, max_nodes)
    n_users = rng.randint(1, max_users)
    nodes = {}
    for k in range(n_nodes):
        tier = rng.choice(list(Tier))
        big = tier is Tier.DATA_CENTER
        r_max = ResourceVector(float(rng.randint(4, 128 if big else 32)), float(rng.randint(4, 256 if big else 64)))
        r_assigned = ResourceVector(float(rng.randint(0, int(r_max.vcpu))), round(rng.uniform(0, r_max.ram), 2))
        price = ResourceVector(round(rng.uniform(0.001, 0.1), 4), round(rng.uniform(0.0, 0.02), 4))
        nid = f"N{k + 1:02d}"
        nodes[nid] = NodeSpec(nid, tier, r_max, r_assigned, price,
                              energy_rate=round(rng.uniform(0, 2), 3) if rng.random() < 0.3 else 0.0,
                              tariff=round(rng.uniform(0, 0.05), 4),
                              scalable=rng.random() < 0.8, t_action=round(rng.uniform(0, 5), 2))
    ids = list(nodes)
    links = []
    # random spanning tree keeps every node reachable
    for k in range(1, len(ids)):
        links.append(Link(ids[rng.randrange(k)], ids[k], float(rng.randint(1, 60))))
    for _ in range(rng.randint(0, len(ids))):
        a, b = rng.sample(ids, 2) if len(ids) > 1 else (None, None)
        if a is not None:
            links.append(Link(a, b, float(rng.randint(1, 60))))
    attachments = {}
    users = {}
    for k in range(n_users):
        uid = f"U{k + 1:02d}"
        attachments[uid] = rng.choice(ids)
        links.append(Link(uid, attachments[uid], float(rng.randint(1, 20)), Interface.WIRELESS))
        users[uid] = UserProfile(
            id=uid, role=rng.choice(list(Role)), interaction=rng.choice(list(Interaction)),
            self_perception=rng.choice(list(Perception)), quality_profile=rng.choice(QUALITY_PROFILES),
            l_max=float(rng.randint(100, 600)), l_proc=float(rng.randint(0, 300)),
            r_usage=ResourceVector(float(rng.randint(0, 10)), round(rng.uniform(0, 2), 2)),
            attachment=uid,
        )
    topo = Topology(nodes, tuple(links), attachments)

    events = []
    active = []
    pending = list(users)
    while pending:
        roll = rng.random()
        if active and roll < 0.15:
            uid = active.pop(rng.randrange(len(active)))
            events.append(UserLeft(uid))
            continue
        if dynamic_events and roll < 0.22:
            nid = rng.choice(ids)
            r_max = nodes[nid].r_max
            events.append(NodeResourcesChanged(nid, r_max=r_max.scale(rng.choice((0.5, 1.0, 1.5)))))
            continue
        if dynamic_events and roll < 0.28:
            link = rng.choice(links)
            events.append(LinkLatencyChanged(link.endpoint_a, link.endpoint_b, float(rng.randint(1, 80))))
            continue
        uid = pending.pop(0)
        active.append(uid)
        events.append(UserJoined(users[uid]))

    strictness = {c: HARD for c in CONSTRAINT_ORDER}
    if soft_penalties:
        for c in CONSTRAINT_ORDER:
            if rng.random() < 0.4:
                strictness[c] = Enforcement.soft(round(rng.uniform(0, 0.3), 3))
    policy = ConstraintPolicy(strictness=strictness)
    tradeoffs = TradeoffVector(round(rng.uniform(0.1, 2), 3), round(rng.uniform(0, 1), 3),
                               round(rng.uniform(0, 1), 3))
    return Scenario(topology=topo, users=users, events=tuple(events), score_table=random_score_table(rng),
                    policy=policy, tradeoffs=tradeoffs, overhead=OverheadModel(), name="synthetic")
