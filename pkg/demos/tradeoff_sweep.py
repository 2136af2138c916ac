"""Sweep the cost weight and watch where the first user gets placed.

With a small beta the nearby edge node wins on QoS; raising beta pushes
the choice toward whichever node is cheapest relative to its capacity.
"""

import dataclasses

from xrorch import load_scenario, reference_scenario_path, run
from xrorch.orchestrator import TradeoffVector

base = load_scenario(reference_scenario_path())

for beta in (0.0, 0.1, 0.5, 1.0, 2.0, 5.0):
    sc = dataclasses.replace(base, tradeoffs=TradeoffVector(1.0, beta, 0.05))
    trace = run(sc)
    path = " ".join(r.j_best or "-" for r in trace)
    n_moves = sum(r.op.value in ("Migration", "ScalingAndMigration") for r in trace)
    print(f"beta={beta:<4} {path}   migrations={n_moves}")
