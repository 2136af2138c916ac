"""
xrorch
======

Context-aware placement and rescheduling of multi-user XR services across
edge and cloud nodes, driven by a deterministic event loop.

.. code:: python

    from xrorch import load_scenario, reference_scenario_path, run

    scenario = load_scenario(reference_scenario_path())
    trace = run(scenario)
    for report in trace:
        print(report.step, report.j_best, report.op.value)
"""

from .constraints import ConstraintPolicy, Enforcement, Strictness, Verdict, VerdictStatus, evaluate
from .costs import (CostBreakdown, OverheadMode, OverheadModel, node_cost, normalized_placement_cost,
                    placement_cost, placement_cost_max, rescheduling_overhead)
from .model import (UNREACHABLE, ConfigurationError, ContentDescriptor, DeploymentMode, Link, NodeSpec,
                    ResourceVector, ScoreTable, Tier, Topology, UserProfile, compute_uel, compute_weight,
                    net_latency, throughput_demand, user_latency, user_qos)
from .orchestrator import (CandidateScore, NoFeasiblePlacement, OrchestratorState, Placement, ReschedulingOp,
                           StepReport, Trace, TradeoffVector, decide_rescheduling, find_best_placement, run,
                           score_candidate, step)
from .scenario import Scenario, ScenarioError, load_scenario, reference_scenario_path, write_trace

__all__ = [
    "ConstraintPolicy", "Enforcement", "Strictness", "Verdict", "VerdictStatus", "evaluate",
    "CostBreakdown", "OverheadMode", "OverheadModel", "node_cost", "normalized_placement_cost",
    "placement_cost", "placement_cost_max", "rescheduling_overhead", "UNREACHABLE",
    "ConfigurationError", "ContentDescriptor", "DeploymentMode", "Link", "NodeSpec",
    "ResourceVector", "ScoreTable", "Tier", "Topology", "UserProfile", "compute_uel",
    "compute_weight", "net_latency", "throughput_demand", "user_latency", "user_qos",
    "CandidateScore", "NoFeasiblePlacement", "OrchestratorState", "Placement", "ReschedulingOp",
    "StepReport", "Trace", "TradeoffVector", "decide_rescheduling", "find_best_placement", "run",
    "score_candidate", "step", "Scenario", "ScenarioError", "load_scenario",
    "reference_scenario_path", "write_trace",
]

__version__ = "0.1.0"
