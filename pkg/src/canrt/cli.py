"""Command line interface.

Subcommands: check, traces, run, explore, verify, serve. Exit codes: 0 success,
2 syntax error, 3 validation error, 4 property failure.
"""

from __future__ import annotations

import argparse
import random
import sys

from .lang import CompiledAgent
from .parser import ParseError, ValidationError, parse_program
from .progress import compile_traces, dump_traces
from .semantics import agent_successors, initial_config
from .explorer import (
    DEFAULT_MAX_STATES,
    StateLimitExceeded,
    explore,
    export_dot,
    export_lab,
    export_sta,
    export_tra,
    format_predicate,
)
from .ctl import check, collect_predicates, parse_ctl, parse_properties
from . import report

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PROPERTY = 4


def _load_agent(path: str) -> CompiledAgent:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read(), path)


def cmd_check(args: argparse.Namespace) -> int:
    agent = _load_agent(args.file)
    table = compile_traces(agent)
    trace_count = sum(len(ts) for ts in table.values())
    print(
        f"OK: {args.file}: {len(agent.initial_beliefs)} initial beliefs, "
        f"{len(agent.external_events)} external events, {len(agent.motivations)} motivations, "
        f"{len(agent.plans)} plans, {len(agent.actions)} actions, {trace_count} full traces"
    )
    return EXIT_OK


def cmd_traces(args: argparse.Namespace) -> int:
    agent = _load_agent(args.file)
    for line in dump_traces(compile_traces(agent)):
        print(line)
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    agent = _load_agent(args.file)
    table = compile_traces(agent)
    rng = random.Random(args.seed)
    cfg = initial_config(agent)
    out = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        out.write(
            report.dump_line(
                {
                    "type": "init",
                    "agent": report.agent_summary(agent),
                    "policy": args.policy,
                    "seed": args.seed,
                    "beliefs": sorted(cfg.beliefs),
                    "records": report.records_view(cfg),
                }
            )
            + "\n"
        )
        steps = 0
        quiescent = False
        while steps < args.max_steps:
            succs = agent_successors(agent, cfg)
            if not succs:
                quiescent = True
                break
            chosen = succs[0] if args.policy == "fifo" else rng.choice(succs)
            out.write(report.dump_line(report.step_record(steps, chosen, cfg, table)) + "\n")
            cfg = chosen.config
            steps += 1
        out.write(
            report.dump_line(
                {
                    "type": "final",
                    "steps": steps,
                    "quiescent": quiescent,
                    "beliefs": sorted(cfg.beliefs),
                    "records": report.records_view(cfg),
                }
            )
            + "\n"
        )
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def _collect_predicates_args(args: argparse.Namespace):
    preds: list = []
    if getattr(args, "props", None):
        with open(args.props, encoding="utf-8") as fh:
            for _, formula in parse_properties(fh.read(), args.props):
                for p in collect_predicates(formula):
                    if p not in preds:
                        preds.append(p)
    for text in getattr(args, "predicate", None) or ():
        formula = parse_ctl(text)
        for p in collect_predicates(formula):
            if p not in preds:
                preds.append(p)
    return tuple(preds)


def cmd_explore(args: argparse.Namespace) -> int:
    agent = _load_agent(args.file)
    preds = _collect_predicates_args(args)
    ts = explore(agent, preds, max_states=args.max_states)
    print(
        f"states {ts.state_count} transitions {ts.transition_count} "
        f"deadlocks {len(ts.deadlocks)} labels {len(preds)}"
    )
    if args.out:
        for ext, render in ((".sta", export_sta), (".tra", export_tra), (".lab", export_lab)):
            path = args.out + ext
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(render(ts))
            print(f"wrote {path}")
    if args.dot:
        with open(args.dot, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(export_dot(ts))
        print(f"wrote {args.dot}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    agent = _load_agent(args.file)
    with open(args.props, encoding="utf-8") as fh:
        props = parse_properties(fh.read(), args.props)
    preds: list = []
    for _, formula in props:
        for p in collect_predicates(formula):
            if p not in preds:
                preds.append(p)
    ts = explore(agent, tuple(preds), max_states=args.max_states)
    print(
        f"states {ts.state_count} transitions {ts.transition_count} deadlocks {len(ts.deadlocks)}"
    )
    width = max((len(name) for name, _ in props), default=4)
    failures = 0
    for name, formula in props:
        result = check(ts, formula)
        verdict = "PASS" if result.holds else "FAIL"
        print(f"{name:<{width}} {verdict} {len(result.sat)}")
        if not result.holds:
            failures += 1
            if result.witness:
                print("  witness: " + " -> ".join(str(i) for i in result.witness))
    return EXIT_PROPERTY if failures else EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve  # deferred: keeps plain CLI import light

    with open(args.file, encoding="utf-8") as fh:
        source = fh.read()
    parse_program(source, args.file)  # fail fast with a real diagnostic
    serve(
        source,
        host=args.host,
        port=args.port,
        journal_dir=args.journal_dir,
        ui_dir=args.ui,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="canrt", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse and validate an agent file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("traces", help="dump compiled full traces, one per line")
    p.add_argument("file")
    p.set_defaults(func=cmd_traces)

    p = sub.add_parser("run", help="execute one run and emit a step report (JSON lines)")
    p.add_argument("file")
    p.add_argument("--policy", choices=("fifo", "random"), default="fifo")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explore", help="build the full transition system and export it")
    p.add_argument("file")
    p.add_argument("--out", help="prefix for .sta/.tra/.lab exports")
    p.add_argument("--dot", help="write a Graphviz view to this path")
    p.add_argument("--props", help="label states with the predicates of this property file")
    p.add_argument("--predicate", action="append", help="label states with this predicate")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("verify", help="model check a property file against an agent")
    p.add_argument("file")
    p.add_argument("props")
    p.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="host interactive sessions over HTTP")
    p.add_argument("file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8450)
    p.add_argument("--journal-dir", help="append per-session journals under this directory")
    p.add_argument("--ui", help="also serve a static dashboard from this directory")
    p.set_defaults(func=cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(str(err), file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as err:
        print(str(err), file=sys.stderr)
        return EXIT_VALIDATION
    except StateLimitExceeded as err:
        print(str(err), file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as err:
        print(f"{err.filename}: no such file", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
