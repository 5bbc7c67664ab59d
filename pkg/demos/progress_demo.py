"""Watch the progress estimate move while a two-plan agent runs, then watch
it drop honestly when the first plan fails and recovery picks the longer one.

    python3 demos/progress_demo.py
"""

import pathlib

from canrt.parser import parse_program
from canrt.progress import compile_traces, dump_traces, estimate_progress
from canrt.semantics import agent_successors, initial_config

EXAMPLES = pathlib.Path(__file__).parent.parent / "src" / "canrt" / "examples"


def run(agent, title):
    table = compile_traces(agent)
    print(f"\n== {title}")
    for line in dump_traces(table):
        print("   full trace:", line)
    cfg = initial_config(agent)
    while True:
        succs = agent_successors(agent, cfg)
        if not succs:
            break
        step = succs[0]
        cfg = step.config
        for it in sorted(cfg.intentions, key=lambda i: i.identifier):
            if not it.trace.elements:
                continue
            est = estimate_progress(it.trace, table)
            band = "" if est.min_ratio == est.max_ratio else f"  (band {est.min_ratio}..{est.max_ratio})"
            print(f"   {step.rule:14} {step.detail:12} trace {';'.join(e.base for e in it.trace.elements):24}"
                  f" ratio {str(est.ratio):5}{band}")
    print("   final records:", {r.identifier: r.status for r in cfg.events})


src = (EXAMPLES / "two_plans.can").read_text()
run(parse_program(src, "two_plans.can"), "nominal run, plan P1 (4-element trace)")

# block P1's first action so recovery falls back to P2's 5-element trace
blocked = src.replace("action a1 : true", "action a1 : blocked_here") + "assert-not blocked_here.\n"
run(parse_program(blocked, "two_plans_blocked.can"),
    "a1 blocked: estimate drops at the recovery truncation, then climbs on P2")
