"""Soft constraints and a budget cap on a hand-built topology.

Two edge nodes and one data center, three users.  RAC is made soft so an
overloaded edge node stays in the running with a penalty, and a tight
opex budget rules the data center out once all three users are on board.
"""

from xrorch.constraints import ConstraintPolicy, Enforcement
from xrorch.model import (Interaction, Link, NodeSpec, Perception, ResourceVector, Role, ScoreTable, Tier,
                          Topology, UserProfile)
from xrorch.orchestrator import UserJoined, run
from xrorch.scenario import Scenario

edge_price = ResourceVector(0.04, 0.01)
nodes = {
    "EA": NodeSpec("EA", Tier.EDGE, ResourceVector(8, 16), ResourceVector(4, 8), edge_price),
    "EB": NodeSpec("EB", Tier.EDGE, ResourceVector(32, 64), ResourceVector(8, 8), edge_price),
    "DC": NodeSpec("DC", Tier.DATA_CENTER, ResourceVector(128, 256), ResourceVector(64, 128),
                   ResourceVector(0.09, 0.008)),
}
links = (
    Link("u1", "EA", 5), Link("u2", "EA", 5), Link("u3", "EB", 5),
    Link("EA", "EB", 30), Link("EA", "DC", 60), Link("EB", "DC", 60),
)
topo = Topology(nodes, links, {"u1": "EA", "u2": "EA", "u3": "EB"})

table = ScoreTable(
    role_scores={"Participant": 1.0, "Producer": 0.7, "Audience": 0.3},
    interaction_scores={"NtoM": 1.0, "OneToN": 0.8, "None": 0.5},
    quality_scores={"QP1": 1.0, "QP2": 0.7},
    perception_scores={"PointCloud": 1.0, "Avatar3D": 0.7, "None": 0.3},
)


def user(uid, role, perception, usage):
    return UserProfile(uid, role, Interaction.N_TO_M, perception, "QP1", l_max=200, l_proc=50,
                       r_usage=usage, attachment=uid)


users = {
    "u1": user("u1", Role.PARTICIPANT, Perception.POINT_CLOUD, ResourceVector(4, 1)),
    "u2": user("u2", Role.PARTICIPANT, Perception.POINT_CLOUD, ResourceVector(4, 1)),
    "u3": user("u3", Role.PRODUCER, Perception.AVATAR_3D, ResourceVector(2, 0.5)),
}
policy = ConstraintPolicy(strictness={"RAC": Enforcement.soft(0.15)}, c_opex=0.6)

sc = Scenario(topology=topo, users=users, events=tuple(UserJoined(u) for u in users.values()),
              score_table=table, policy=policy)

for r in run(sc):
    print(f"t{r.step} {r.event}: best={r.j_best} op={r.op.value}")
    for s in r.scores:
        f = "discarded" if s.f is None else f"{s.f:.4f}"
        print(f"    {s.placement_id} {s.verdict.status.value:<8} f={f:<10} {s.verdict.reason}")
