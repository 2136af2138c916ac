"""How engagement level and latency turn into a per-user QoS contribution.

Three users with different roles sit behind the same edge node; we print
their engagement level, the latency to each candidate node and the weighted
QoS term that ends up in the objective.
"""

from xrorch import load_scenario, reference_scenario_path
from xrorch.model import compute_uel, net_latency, user_latency, user_qos

sc = load_scenario(reference_scenario_path())
topo = sc.topology

for uid in ("UE1", "UE2", "UE4"):
    u = sc.users[uid]
    uel = compute_uel(u, sc.score_table)
    print(f"{uid}  role={u.role.value:<11} UEL={uel:.4f}")
    for node in topo.node_ids:
        lat = user_latency(u.l_proc, net_latency(topo, u.attachment, node))
        q = user_qos(lat, u.l_max)
        print(f"    {node:<4} latency {float(lat):6.1f} ms   qos {q:.4f}   weighted {uel * q:.4f}")
