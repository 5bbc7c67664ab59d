"""Self-describing run records shared by the CLI runner and the sim service.

Records are plain dicts serialized as one JSON object per line with sorted
keys, so two runs of the same seeded policy are byte-identical.
"""

from __future__ import annotations

import json

from .lang import CompiledAgent, format_body
from .progress import NoMatchingTrace, TraceTable, estimate_progress
from .semantics import AgentConfig, AgentSuccessor


def records_view(cfg: AgentConfig) -> list[dict]:
    return [
        {"identifier": r.identifier, "event": r.event, "status": r.status}
        for r in sorted(cfg.events, key=lambda r: r.identifier)
    ]


def intentions_view(cfg: AgentConfig, table: TraceTable) -> list[dict]:
    out = []
    for it in sorted(cfg.intentions, key=lambda i: i.identifier):
        entry: dict = {
            "identifier": it.identifier,
            "root": it.trace.root,
            "body": format_body(it.body),
            "trace": [el.base for el in it.trace.elements],
            "ratio": None,
            "ratio_min": None,
            "ratio_max": None,
            "ratio_exact": None,
        }
        if it.trace.elements:
            try:
                est = estimate_progress(it.trace, table)
            except NoMatchingTrace:
                est = None
            if est is not None:
                entry.update(
                    ratio=float(est.ratio),
                    ratio_min=float(est.min_ratio),
                    ratio_max=float(est.max_ratio),
                    ratio_exact=f"{est.ratio.numerator}/{est.ratio.denominator}",
                )
        out.append(entry)
    return out


def agent_summary(agent: CompiledAgent) -> dict:
    return {
        "external_events": [{"event": e, "identifier": i} for e, i in agent.external_events],
        "motivations": [
            {"event": m.event, "identifier": m.identifier} for m in agent.motivations
        ],
        "plans": len(agent.plans),
        "actions": len(agent.actions),
    }


def step_record(
    index: int,
    succ: AgentSuccessor,
    prev: AgentConfig,
    table: TraceTable,
) -> dict:
    cfg = succ.config
    return {
        "type": "step",
        "step": index,
        "rule": succ.rule,
        "subject": succ.identifier,
        "detail": succ.detail,
        "beliefs_added": sorted(cfg.beliefs - prev.beliefs),
        "beliefs_removed": sorted(prev.beliefs - cfg.beliefs),
        "records": records_view(cfg),
        "intentions": intentions_view(cfg, table),
        "attention": [{"event": e, "identifier": i} for e, i in succ.attention],
    }


def status_changes(prev: AgentConfig, cfg: AgentConfig) -> list[dict]:
    before = {r.identifier: r.status for r in prev.events}
    out = []
    for r in sorted(cfg.events, key=lambda r: r.identifier):
        old = before.get(r.identifier)
        if old != r.status:
            out.append({"identifier": r.identifier, "from": old, "to": r.status})
    return out


def dump_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))
