"""Command-line entry point: ``xrorch validate|run|score|explain``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .model import ConfigurationError
from .orchestrator import run
from .scenario import ScenarioError, fmt, load_scenario, write_trace

log = logging.getLogger("xrorch")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PATH = 3
EXIT_INVALID = 4
EXIT_RUNTIME = 5


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str):
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(path)
    return load_scenario(p)


def _report_at(scenario, k: int):
    if not 1 <= k <= len(scenario.events):
        raise IndexError(f"--at-step must lie in 1..{len(scenario.events)}, got {k}")
    return run(scenario, until=k)[k - 1]


def cmd_validate(args, out):
    s = _load(args.scenario)
    out.write(f"ok: {len(s.topology.nodes)} nodes, {len(s.users)} users, {len(s.events)} events\n")


def cmd_run(args, out):
    s = _load(args.scenario)
    trace = run(s)
    paths = write_trace(trace, args.out, args.format, scenario_name=s.name)
    for step, msg in trace.errors:
        log.error("step %d: %s", step, msg)
    for p in paths:
        log.info("wrote %s", p)
    out.write(f"{len(trace)} steps written to {paths[0].parent}\n")


def cmd_score(args, out):
    s = _load(args.scenario)
    r = _report_at(s, args.at_step)
    out.write(f"t{r.step}: {r.event}  (j_current={r.j_current or 'None'})\n")
    out.write(f"{'placement':<10} {'status':<9} {'qos_norm':>9} {'cost_norm':>9} {'ro_norm':>9} "
              f"{'penalty':>9} {'F':>9}  reason\n")
    for c in r.scores:
        mark = "*" if c.placement_id == r.j_best else " "
        reason = c.verdict.reason if c.discarded else ""
        f = fmt(c.f) if c.f is not None else "-"
        out.write(f"{c.placement_id + mark:<10} {c.verdict.status.value:<9} {fmt(c.qos_norm):>9} "
                  f"{fmt(c.cost_norm):>9} {fmt(c.ro_norm):>9} {fmt(c.penalty):>9} {f:>9}  {reason}\n")
    out.write(f"j_best={r.j_best or 'None'} F_best={fmt(r.f_best) or 'None'} RO={r.op.value}\n")


def cmd_explain(args, out):
    s = _load(args.scenario)
    r = _report_at(s, args.at_step)
    match = [c for c in r.scores if c.placement_id == args.placement]
    if not match:
        raise KeyError(f"no placement {args.placement!r} at step {args.at_step}")
    c = match[0]
    h = s.tradeoffs
    out.write(f"placement {c.placement_id} at t{r.step} ({r.event}): {c.verdict.status.value}"
              f"{' - ' + c.verdict.reason if c.verdict.reason else ''}\n")
    out.write(f"{'user':<8} {'weight':>8} {'latency':>10} {'qos_u':>8} {'w*qos':>8}\n")
    for t in c.user_terms:
        out.write(f"{t.user_id:<8} {fmt(t.weight):>8} {fmt(t.latency):>10} {fmt(t.qos):>8} "
                  f"{fmt(t.weight * t.qos):>8}\n")
    out.write(f"qos_norm  = {fmt(c.qos_norm)}   x alpha  {fmt(h.alpha)} = {fmt(h.alpha * c.qos_norm)}\n")
    out.write(f"cost_norm = {fmt(c.cost_norm)}   x beta   {fmt(h.beta)} = {fmt(-h.beta * c.cost_norm)}"
              f"   (cost {fmt(c.cost)} / max {fmt(c.cost_max)})\n")
    out.write(f"ro_norm   = {fmt(c.ro_norm)}   x lambda {fmt(h.lam)} = {fmt(-h.lam * c.ro_norm)}"
              f"   (Cost_RO {fmt(c.ro_cost)})\n")
    out.write(f"penalty   = {fmt(-c.penalty)}\n")
    out.write(f"F         = {fmt(c.f) if c.f is not None else 'discarded'}\n")
    for name, chk in c.verdict.per_constraint.items():
        out.write(f"  {name:<5} {'ok  ' if chk.satisfied else 'FAIL'} margin {fmt(chk.margin)} {chk.detail}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="xrorch", description="Edge-cloud placement simulator for multi-user XR services.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("validate", help="load and validate a scenario file")
    v.add_argument("scenario")
    v.set_defaults(func=cmd_validate)

    r = sub.add_parser("run", help="run the full event sequence and write the trace")
    r.add_argument("scenario")
    r.add_argument("--out", default=None, help="output directory (default: $XRORCH_OUTPUT_DIR or ./xrorch-out)")
    r.add_argument("--format", choices=("csv", "json", "all"), default="all")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("score", help="print the candidate table at one step")
    s.add_argument("scenario")
    s.add_argument("--at-step", type=int, required=True)
    s.set_defaults(func=cmd_score)

    e = sub.add_parser("explain", help="break one placement's F down term by term")
    e.add_argument("scenario")
    e.add_argument("--at-step", type=int, required=True)
    e.add_argument("--placement", required=True)
    e.set_defaults(func=cmd_explain)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args, out)
    except FileNotFoundError as exc:
        log.error("no such file: %s", exc)
        return EXIT_PATH
    except (ScenarioError, ConfigurationError) as exc:
        log.error("invalid scenario: %s", exc)
        return EXIT_INVALID
    except (IndexError, KeyError, OSError, RuntimeError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
