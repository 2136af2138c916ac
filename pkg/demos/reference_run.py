"""Run the bundled nine-user scenario and print the decision table.

E2 fills up at t5 and the service moves to E1; at t8 neither edge node
has room left and the service lands in a data center.
"""

from xrorch import load_scenario, reference_scenario_path, run
from xrorch.scenario import fmt

sc = load_scenario(reference_scenario_path())
trace = run(sc)

print(f"{'time':<5} {'event':<12} {'current':<8} {'best':<6} {'F':>7}  op")
for r in trace:
    print(f"t{r.step:<4} {r.event:<12} {r.j_current or '-':<8} {r.j_best:<6} {fmt(r.f_best):>7}  {r.op.value}")
    for node, (old, new) in r.deltas.items():
        print(f"      scaled {node}: {old.vcpu:g} -> {new.vcpu:g} vCPU, {old.ram:g} -> {new.ram:g} GB")

discarded = [(r.step, s.placement_id) for r in trace for s in r.scores if s.discarded]
print("\nfirst discards:", discarded[:3])
