"""Quantitative progress estimation over compiled goal-plan traces.

At load time every external and motivation event is unfolded into its set of
full traces: root-to-leaf walks of the goal-plan tree listing the event, the
chosen plan, and that plan's actions and sub-events (recursively, so recursion
is rejected by the validator). Parallel bodies are linearized left to right.

At run time each intention carries the trace it has produced so far; the ratio
of its length to the longest full trace it can still belong to is the
conservative progress estimate, and the shortest gives the optimistic bound.
Every element is labeled by its path through the tree, so the same action name
in two plans never collides.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .lang import (
    Act,
    CanrtError,
    CompiledAgent,
    Event,
    Goal,
    Nil,
    Par,
    PlanBody,
    Seq,
)


class TraceDesync(CanrtError):
    """The runtime produced a step no compiled trace can account for."""


class NoMatchingTrace(CanrtError):
    """No full trace contains the current trace; progress is undefined."""


@dataclass(frozen=True)
class TraceElement:
    kind: str    # "event" | "plan" | "action"
    label: str   # path-qualified, unique per tree position
    base: str    # display name

    def __str__(self) -> str:
        return self.base


@dataclass(frozen=True)
class FullTrace:
    elements: tuple[TraceElement, ...]

    @property
    def length(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class CurrentTrace:
    root: str
    elements: tuple[TraceElement, ...] = ()


# op kinds produced by the stepper, consumed by update_trace
@dataclass(frozen=True)
class AppendOp:
    kind: str
    base: str


@dataclass(frozen=True)
class TruncateOp:
    event: str
    inclusive: bool


TraceOp = AppendOp | TruncateOp
TraceTable = dict[str, tuple[FullTrace, ...]]


# ── compilation ───────────────────────────────────────────────────────────

def _linearize(body: PlanBody) -> list[PlanBody]:
    """Flatten a body into its leaf items in execution order (Par: left, right)."""
    match body:
        case Nil():
            return []
        case Seq(a, b) | Par(a, b):
            return _linearize(a) + _linearize(b)
        case _:
            return [body]


def _expand_event(agent: CompiledAgent, name: str, label: str) -> list[list[TraceElement]]:
    head = TraceElement("event", label, name)
    plans = agent.plans_for(name)
    if not plans:
        return [[head]]
    out: list[list[TraceElement]] = []
    for plan in plans:
        plan_el = TraceElement("plan", f"{label}.{plan.label}", plan.label)
        for tail in _expand_body(agent, plan.body, plan_el.label):
            out.append([head, plan_el] + tail)
    return out


def _expand_body(agent: CompiledAgent, body: PlanBody, prefix: str) -> list[list[TraceElement]]:
    options: list[list[list[TraceElement]]] = []
    for ordinal, item in enumerate(_linearize(body), start=1):
        match item:
            case Act(name):
                options.append([[TraceElement("action", f"{prefix}.{name}#{ordinal}", name)]])
            case Event(name):
                options.append(_expand_event(agent, name, f"{prefix}.{name}#{ordinal}"))
            case Goal(_, Event(name), _):
                options.append(_expand_event(agent, name, f"{prefix}.{name}#{ordinal}"))
            case _:
                raise TypeError(f"unexpected body item: {item!r}")
    return [sum(combo, []) for combo in product(*options)] if options else [[]]


@lru_cache(maxsize=None)
def compile_traces(agent: CompiledAgent) -> TraceTable:
    """Full traces per external and motivation event, in declaration order."""
    table: TraceTable = {}
    roots: list[str] = []
    for event, _ in agent.external_events:
        if event not in roots:
            roots.append(event)
    for m in agent.motivations:
        if m.event not in roots:
            roots.append(m.event)
    for root in roots:
        table[root] = tuple(FullTrace(tuple(els)) for els in _expand_event(agent, root, root))
    return table


def dump_traces(table: TraceTable) -> list[str]:
    """One line per full trace: display names ';'-joined, length appended."""
    lines = []
    for traces in table.values():
        for t in traces:
            lines.append(";".join(el.base for el in t.elements) + f" {t.length}")
    return lines


# ── runtime maintenance ───────────────────────────────────────────────────

def _matching(table: TraceTable, trace: CurrentTrace) -> list[FullTrace]:
    fulls = table.get(trace.root, ())
    have = set(trace.elements)
    return [t for t in fulls if have.issubset(t.elements)]


def update_trace(trace: CurrentTrace, op: TraceOp, table: TraceTable) -> CurrentTrace:
    """Apply one stepper-emitted trace op; raises TraceDesync when impossible."""
    if isinstance(op, TruncateOp):
        for i in range(len(trace.elements) - 1, -1, -1):
            el = trace.elements[i]
            if el.kind == "event" and el.base == op.event:
                keep = i + 1 if op.inclusive else i
                return CurrentTrace(trace.root, trace.elements[:keep])
        raise TraceDesync(f"no event element {op.event!r} to truncate to in {trace}")

    have = set(trace.elements)
    candidates: list[tuple[int, TraceElement]] = []
    for full in _matching(table, trace):
        for pos, el in enumerate(full.elements):
            if el.kind == op.kind and el.base == op.base and el not in have:
                candidates.append((pos, el))
                break
    if not candidates:
        raise TraceDesync(f"cannot append {op.kind} {op.base!r} after {[e.base for e in trace.elements]}")
    _, chosen = min(candidates, key=lambda c: (c[0], c[1].label))
    return CurrentTrace(trace.root, trace.elements + (chosen,))


def apply_trace_ops(trace: CurrentTrace, ops: tuple[TraceOp, ...], table: TraceTable) -> CurrentTrace:
    for op in ops:
        trace = update_trace(trace, op, table)
    return trace


# ── estimation ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class ProgressEstimate:
    ratio: Fraction      # conservative: k / longest matching full trace
    min_ratio: Fraction
    max_ratio: Fraction  # optimistic: k / shortest matching full trace


def estimate_progress(trace: CurrentTrace, table: TraceTable) -> ProgressEstimate:
    """Exact rational progress of a non-empty current trace."""
    if not trace.elements:
        raise NoMatchingTrace("progress is undefined for an empty trace")
    matching = _matching(table, trace)
    if not matching:
        raise NoMatchingTrace(f"no full trace contains {[e.base for e in trace.elements]}")
    k = len(trace.elements)
    lengths = [t.length for t in matching]
    return ProgressEstimate(
        ratio=Fraction(k, max(lengths)),
        min_ratio=Fraction(k, max(lengths)),
        max_ratio=Fraction(k, min(lengths)),
    )
