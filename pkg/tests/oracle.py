"""Brute-force reference scorer, independent of the engine.

Works from plain dicts, enumerates every simple path for latencies and
evaluates the objective by direct arithmetic over every single-node
placement.  Only meant for tiny instances (a handful of nodes and users).
"""

import math

SCALING_OH = 0.5
MIGRATION_OH = 1.0
RO_MAX = 1.5


def all_path_latency(edges, src, dst):
    """Minimum latency over every simple path from ``src`` to ``dst``; inf if none."""
    adj = {}
    for a, b, lat in edges:
        adj.setdefault(a, []).append((b, lat))
        adj.setdefault(b, []).append((a, lat))
    if src == dst:
        return 0.0
    best = math.inf
    stack = [(src, 0.0, {src})]
    while stack:
        v, acc, seen = stack.pop()
        for w, lat in adj.get(v, []):
            if w in seen:
                continue
            if w == dst:
                best = min(best, acc + lat)
            else:
                stack.append((w, acc + lat, seen | {w}))
    return best


def uel(user, table):
    w = table["weights"]
    return (w["w_rq"] * table["quality"][user["quality"]] + w["w_r"] * table["role"][user["role"]]
            + w["w_i"] * table["interaction"][user["interaction"]]
            + w["w_ps"] * table["perception"][user["perception"]])


def score_all(nodes, edges, users, table, abl, current, assigned):
    """Objective per node id, or None when a hard constraint fails.

    nodes: id -> dict(r_max=(c, r), price=(c, r), tariff, energy, scalable)
    users: list of dict(id, source, l_proc, l_max, usage=(c, r), role, ...)
    assigned: id -> (c, r) currently provisioned
    Returns {node: (f or None, needs_scaling)}.
    """
    alpha, beta, lam = abl
    out = {}
    n = len(users)
    for nid, nd in nodes.items():
        demand = (sum(u["usage"][0] for u in users), sum(u["usage"][1] for u in users))
        fits = demand[0] <= nd["r_max"][0] and demand[1] <= nd["r_max"][1]
        target = (min(demand[0], nd["r_max"][0]), min(demand[1], nd["r_max"][1]))
        scale = target[0] > assigned[nid][0] or target[1] > assigned[nid][1]
        qos_total = 0.0
        latency_ok = True
        for u in users:
            lat = u["l_proc"] + all_path_latency(edges, u["source"], nid)
            if lat > u["l_max"]:
                latency_ok = False
            q = 0.0 if math.isinf(lat) else max(0.0, 1.0 - lat / u["l_max"])
            qos_total += uel(u, table) * q
        qos_norm = qos_total / n
        cost = nd["price"][0] * demand[0] + nd["price"][1] * demand[1] + nd["tariff"] * nd["energy"]
        cost_max = n * (nd["price"][0] * nd["r_max"][0] + nd["price"][1] * nd["r_max"][1]) + nd["tariff"] * nd["energy"]
        cost_norm = min(1.0, max(0.0, cost / cost_max))
        ro = (SCALING_OH if scale else 0.0) + (MIGRATION_OH if current != nid else 0.0)
        ro_norm = ro / RO_MAX
        feasible = fits and latency_ok and (nd["scalable"] or not scale)
        f = alpha * qos_norm - beta * cost_norm - lam * ro_norm if feasible else None
        out[nid] = (f, scale)
    return out


def pick(scores, current, scale=1.0):
    live = {k: v[0] for k, v in scores.items() if v[0] is not None}
    if not live:
        return None
    top = max(live.values())
    tied = sorted(k for k, f in live.items() if abs(f - top) <= 1e-9 * max(abs(f), abs(top), scale))
    if current in tied:
        return current
    return tied[0]
