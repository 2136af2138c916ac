import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import make_user
from oracle import all_path_latency
from xrorch.model import (UNREACHABLE, ConfigurationError, DeploymentMode, ExtraColumn, Link, NodeSpec,
                          ResourceVector, ScoreTable, Tier, Topology, compute_uel, compute_weight, is_unreachable,
                          net_latency, throughput_demand, user_latency, user_qos)


def _hand_uel(*scores):
    # four equally weighted factors, exact rational arithmetic
    return float(sum(Fraction(s).limit_denominator(1000) for s in scores) / 4)


def test_uel_participant_is_one(table):
    assert compute_uel(make_user(kind="participant"), table) == 1.0


def test_uel_producer(table):
    expected = _hand_uel("0.7", "0.8", "0.7", "0.7")
    assert expected == pytest.approx(0.725, abs=1e-12)
    assert compute_uel(make_user(kind="producer"), table) == pytest.approx(expected, abs=1e-9)


def test_uel_audience(table):
    expected = _hand_uel("0.3", "0.5", "0.5", "0.3")
    assert compute_uel(make_user(kind="audience"), table) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.40, abs=1e-12)


def test_uel_missing_entry_names_key(table):
    user = make_user(quality_profile="QP9")
    with pytest.raises(ConfigurationError, match="QP9"):
        compute_uel(user, table)


def test_score_table_rejects_bad_weights():
    with pytest.raises(ConfigurationError, match="sum"):
        ScoreTable({"Participant": 1}, {"NtoM": 1}, {"QP1": 1}, {"PointCloud": 1}, 0.3, 0.3, 0.3, 0.2)


def test_extra_columns_join_the_weight_sum(table):
    t = ScoreTable(table.role_scores, table.interaction_scores, table.quality_scores, table.perception_scores,
                   w_r=0.2, w_i=0.2, w_rq=0.2, w_ps=0.2,
                   extra=(ExtraColumn("fg_consistency", 0.2, {"true": 1.0, "false": 0.0}),))
    user = make_user(kind="audience")
    assert compute_uel(user, t) == pytest.approx(0.2 * (0.3 + 0.5 + 0.5 + 0.3), abs=1e-12)


def test_others_perception_defaults_to_self():
    assert make_user(kind="producer").others_perception == "Avatar3D"


_score = st.floats(0, 1)


@st.composite
def tables_and_scores(draw):
    raw = [draw(st.floats(0.01, 1)) for _ in range(4)]
    total = sum(raw)
    w = [x / total for x in raw]
    w[3] = max(0.0, 1.0 - w[0] - w[1] - w[2])
    t = ScoreTable({"Participant": draw(_score)}, {"NtoM": draw(_score)}, {"QP1": draw(_score)},
                   {"PointCloud": draw(_score)}, *w)
    return t


@given(tables_and_scores())
def test_uel_bounded(t):
    assert 0.0 <= compute_uel(make_user(), t) <= 1.0


@given(tables_and_scores(), st.sampled_from(["role", "interaction", "quality", "perception"]), st.floats(0, 1))
def test_uel_monotone_in_each_score(t, column, bump):
    user = make_user()
    maps = {
        "role": (t.role_scores, "Participant"), "interaction": (t.interaction_scores, "NtoM"),
        "quality": (t.quality_scores, "QP1"), "perception": (t.perception_scores, "PointCloud"),
    }
    scores, key = maps[column]
    raised = dict(scores)
    raised[key] = max(scores[key], bump)
    kwargs = {"role_scores": t.role_scores, "interaction_scores": t.interaction_scores,
              "quality_scores": t.quality_scores, "perception_scores": t.perception_scores}
    kwargs[f"{column}_scores"] = raised
    t2 = ScoreTable(**kwargs, w_r=t.w_r, w_i=t.w_i, w_rq=t.w_rq, w_ps=t.w_ps)
    assert compute_uel(user, t2) >= compute_uel(user, t) - 1e-15


def test_weight_default_is_uel():
    assert compute_weight(0.725) == 0.725
    assert compute_weight(0.0) == 0.0


def test_weight_extended_uses_uol():
    assert compute_weight(1.0, DeploymentMode(uol=0.5), combiner="extended") == 0.5
    assert compute_weight(1.0, DeploymentMode(uol=0.5), 0.9, combiner="extended",
                          pref_gain=lambda p: 1.0) == 0.5


def _node(nid, tier=Tier.EDGE):
    return NodeSpec(nid, tier, ResourceVector(16, 32), ResourceVector(8, 5), ResourceVector(0.0376, 0.0104))


def test_net_latency_single_hop():
    topo = Topology({"E2": _node("E2")}, (Link("UE1", "E2", 10),), {"UE1": "E2"})
    assert net_latency(topo, "UE1", "E2") == 10


def test_net_latency_zero_on_attachment_host_without_radio_link():
    topo = Topology({"E2": _node("E2")}, (), {"UE1": "E2"})
    assert net_latency(topo, "UE1", "E2") == 0


def test_net_latency_unreachable():
    topo = Topology({"E1": _node("E1"), "E2": _node("E2")}, (Link("UE1", "E2", 10),), {"UE1": "E2"})
    assert net_latency(topo, "UE1", "E1") is UNREACHABLE


def test_net_latency_picks_shorter_of_two_paths():
    # UE1-A: 5; A-B-D: 10+15 (total 30); A-C-D: 20+20 (total 45)
    nodes = {n: _node(n) for n in "ABCD"}
    links = (Link("UE1", "A", 5), Link("A", "B", 10), Link("B", "D", 15), Link("A", "C", 20), Link("C", "D", 20))
    topo = Topology(nodes, links, {"UE1": "A"})
    edges = [(lk.endpoint_a, lk.endpoint_b, lk.latency) for lk in links]
    assert all_path_latency(edges, "UE1", "D") == 30
    assert net_latency(topo, "UE1", "D") == 30


@st.composite
def small_graphs(draw):
    n = draw(st.integers(2, 6))
    names = [f"N{i}" for i in range(n)]
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i + 1:]]
    chosen = draw(st.lists(st.sampled_from(pairs), max_size=len(pairs), unique=True))
    edges = [(a, b, draw(st.integers(0, 50))) for a, b in chosen]
    return names, edges


@settings(max_examples=200)
@given(small_graphs())
def test_net_latency_matches_path_enumeration(graph):
    names, edges = graph
    nodes = {n: _node(n) for n in names}
    links = tuple(Link(a, b, float(lat)) for a, b, lat in edges)
    topo = Topology(nodes, links, {f"UE_{n}": n for n in names})
    for src in names:
        for dst in names:
            expected = all_path_latency(edges, src, dst)
            got = net_latency(topo, f"UE_{src}", dst)
            if math.isinf(expected):
                assert is_unreachable(got)
            else:
                assert got == expected
    # triangle property of shortest paths
    for a in names:
        for b in names:
            for c in names:
                ab = float(net_latency(topo, f"UE_{a}", b))
                bc = float(net_latency(topo, f"UE_{b}", c))
                ac = float(net_latency(topo, f"UE_{a}", c))
                assert ac <= ab + bc


def test_user_latency():
    assert user_latency(300, 50) == 350
    assert user_latency(0, 0) == 0
    assert user_latency(100, UNREACHABLE) is UNREACHABLE


def test_unreachable_is_absorbing_and_ordered():
    assert UNREACHABLE + 5 is UNREACHABLE
    assert 5 + UNREACHABLE is UNREACHABLE
    assert UNREACHABLE > 1e308
    assert float(UNREACHABLE) == math.inf


def test_user_qos_endpoints():
    assert user_qos(0, 500) == 1.0
    assert user_qos(500, 500) == 0.0
    assert user_qos(700, 500) == 0.0
    assert user_qos(350, 500) == pytest.approx(0.3, abs=1e-12)
    assert user_qos(UNREACHABLE, 500) == 0.0


def test_user_qos_throughput_term():
    assert user_qos(0, 500, th=25, th_min=50) == 0.5
    assert user_qos(250, 500, th=100, th_min=50) == 0.5


@given(st.floats(0, 1000), st.floats(0, 1000), st.floats(1, 1000))
def test_user_qos_bounded_and_monotone(a, b, l_max):
    qa, qb = user_qos(a, l_max), user_qos(b, l_max)
    assert 0.0 <= qa <= 1.0
    if a < b < l_max:
        assert qa > qb
    if a >= l_max:
        assert qa == 0.0


def test_throughput_demand_lookup():
    assert throughput_demand(make_user(quality_profile="QP1"), {"QP1": 50}) == 50
    assert throughput_demand(make_user(), None) == 0
    assert throughput_demand(make_user(kind="audience"), {"QP3": 5}) == 5


def test_resource_vector_rejects_negative():
    with pytest.raises(ValueError):
        ResourceVector(-1, 0)


def test_node_rejects_overprovisioning():
    with pytest.raises(ValueError, match="exceeds"):
        NodeSpec("X", Tier.EDGE, ResourceVector(4, 4), ResourceVector(8, 4), ResourceVector())
