"""Exhaustive exploration of agent configurations into a finite transition system.

States are deduplicated by an injective canonical string covering event
records, beliefs, intention bodies, current traces, and fired motivation
rules. Deadlocked states are totalized with self-loops so path quantifiers
range over infinite paths. Numbering is breadth-first discovery order, which
is deterministic because successor enumeration is.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .beliefs import entails
from .lang import CanrtError, CompiledAgent, Formula, Nil, format_formula
from .progress import TraceTable, compile_traces, estimate_progress
from .semantics import (
    AgentConfig,
    agent_successors,
    check_config,
    initial_config,
    is_blocked,
)

DEFAULT_MAX_STATES = 100_000


class StateLimitExceeded(CanrtError):
    pass


class UnknownLabel(CanrtError):
    pass


# ── predicates ────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class EventStatus:
    identifier: str
    status: str


@dataclass(frozen=True)
class IntentionCompleted:
    identifier: str


@dataclass(frozen=True)
class IntentionBlocked:
    identifier: str


@dataclass(frozen=True)
class BeliefHolds:
    formula: Formula


@dataclass(frozen=True)
class DesireContains:
    event: str


@dataclass(frozen=True)
class ProgressAtLeast:
    identifier: str
    threshold: Fraction


Predicate = (
    EventStatus | IntentionCompleted | IntentionBlocked | BeliefHolds | DesireContains | ProgressAtLeast
)


def format_predicate(p: Predicate) -> str:
    match p:
        case EventStatus(identifier, status):
            return f"status({identifier})={status}"
        case IntentionCompleted(identifier):
            return f"completed({identifier})"
        case IntentionBlocked(identifier):
            return f"blocked({identifier})"
        case BeliefHolds(formula):
            return f"believes({format_formula(formula)})"
        case DesireContains(event):
            return f"desires({event})"
        case ProgressAtLeast(identifier, threshold):
            return f"progress({identifier})>={threshold}"
    raise TypeError(f"not a predicate: {p!r}")


def eval_predicate(
    agent: CompiledAgent, cfg: AgentConfig, pred: Predicate, table: TraceTable | None = None
) -> bool:
    if table is None:
        table = compile_traces(agent)
    match pred:
        case EventStatus(identifier, status):
            return any(r.identifier == identifier and r.status == status for r in cfg.events)
        case IntentionCompleted(identifier):
            return any(i.identifier == identifier and isinstance(i.body, Nil) for i in cfg.intentions)
        case IntentionBlocked(identifier):
            return any(
                i.identifier == identifier
                and not isinstance(i.body, Nil)
                and is_blocked(agent, cfg.beliefs, i.body)
                for i in cfg.intentions
            )
        case BeliefHolds(formula):
            return entails(cfg.beliefs, formula)
        case DesireContains(event):
            return any(r.event == event for r in cfg.events)
        case ProgressAtLeast(identifier, threshold):
            for i in cfg.intentions:
                if i.identifier != identifier:
                    continue
                if not i.trace.elements:
                    ratio = Fraction(0)  # adopted but unstepped counts as zero progress
                else:
                    ratio = estimate_progress(i.trace, table).ratio
                return ratio >= threshold
            return False
    raise TypeError(f"not a predicate: {pred!r}")


# ── canonical state keys ──────────────────────────────────────────────────

def canonical_form(cfg: AgentConfig) -> str:
    """Injective, order-free serialization of a configuration."""
    from .lang import body_key  # local import keeps module load order simple

    events = ",".join(
        f"{r.identifier}={r.event}:{r.status}" for r in sorted(cfg.events, key=lambda r: r.identifier)
    )
    beliefs = ",".join(sorted(cfg.beliefs))
    intentions = "".join(
        "{%s=%s@%s:%s}" % (i.identifier, body_key(i.body), i.trace.root, ",".join(e.label for e in i.trace.elements))
        for i in sorted(cfg.intentions, key=lambda i: i.identifier)
    )
    fired = ",".join(sorted(cfg.fired_motivations))
    return f"E[{events}]B[{beliefs}]G[{intentions}]M[{fired}]"


# ── the transition system ─────────────────────────────────────────────────

@dataclass
class TransitionSystem:
    states: list[AgentConfig | None]
    canonical: list[str]
    transitions: set[tuple[int, int]]
    initial: int
    deadlocks: frozenset[int]
    predicates: tuple[Predicate, ...]
    labels: list[frozenset[int]]  # per state: indices into predicates
    _succs: list[list[int]] | None = field(default=None, repr=False)

    @property
    def state_count(self) -> int:
        return len(self.canonical)

    @property
    def transition_count(self) -> int:
        return len(self.transitions)

    def successors(self) -> list[list[int]]:
        if self._succs is None:
            out: list[list[int]] = [[] for _ in range(self.state_count)]
            for a, b in sorted(self.transitions):
                out[a].append(b)
            self._succs = out
        return self._succs

    def predecessors(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.state_count)]
        for a, b in sorted(self.transitions):
            out[b].append(a)
        return out


def explore(
    agent: CompiledAgent,
    predicates: tuple[Predicate, ...] = (),
    *,
    max_states: int = DEFAULT_MAX_STATES,
    legacy: bool = False,
    order: str = "bfs",
) -> TransitionSystem:
    """Reachable configurations under agent_step, deadlocks totalized with self-loops."""
    table = compile_traces(agent)
    init = initial_config(agent)
    index: dict[str, int] = {canonical_form(init): 0}
    states: list[AgentConfig] = [init]
    canonical = [canonical_form(init)]
    transitions: set[tuple[int, int]] = set()
    deadlocks: set[int] = set()
    frontier: deque[int] = deque([0])

    while frontier:
        i = frontier.popleft() if order == "bfs" else frontier.pop()
        cfg = states[i]
        if not legacy:
            check_config(agent, cfg)
        seen_here: set[int] = set()
        ordered: list[int] = []
        for succ in agent_successors(agent, cfg, legacy=legacy):
            key = canonical_form(succ.config)
            j = index.get(key)
            if j is None:
                if len(states) >= max_states:
                    raise StateLimitExceeded(f"exploration exceeded {max_states} states")
                j = len(states)
                index[key] = j
                states.append(succ.config)
                canonical.append(key)
                frontier.append(j)
            if j not in seen_here:
                seen_here.add(j)
                ordered.append(j)
        if not ordered:
            transitions.add((i, i))
            deadlocks.add(i)
        else:
            for j in ordered:
                transitions.add((i, j))

    labels = [
        frozenset(k for k, p in enumerate(predicates) if eval_predicate(agent, cfg, p, table))
        for cfg in states
    ]
    return TransitionSystem(
        states=list(states),
        canonical=canonical,
        transitions=transitions,
        initial=0,
        deadlocks=frozenset(deadlocks),
        predicates=predicates,
        labels=labels,
    )


# ── exports ───────────────────────────────────────────────────────────────

def export_sta(ts: TransitionSystem) -> str:
    return "".join(f"{i}: {ts.canonical[i]}\n" for i in range(ts.state_count))


def export_tra(ts: TransitionSystem) -> str:
    lines = [f"{ts.state_count} {ts.transition_count}\n"]
    lines.extend(f"{a} {b}\n" for a, b in sorted(ts.transitions))
    return "".join(lines)


def export_lab(ts: TransitionSystem) -> str:
    decls = ['0="init"', '1="deadlock"']
    decls.extend(f'{k + 2}="{format_predicate(p)}"' for k, p in enumerate(ts.predicates))
    lines = [" ".join(decls) + "\n"]
    for i in range(ts.state_count):
        ids = []
        if i == ts.initial:
            ids.append(0)
        if i in ts.deadlocks:
            ids.append(1)
        ids.extend(k + 2 for k in sorted(ts.labels[i]))
        if ids:
            lines.append(f"{i}: " + " ".join(str(x) for x in ids) + "\n")
    return "".join(lines)


def export_dot(ts: TransitionSystem) -> str:
    lines = ["digraph agent {", "  rankdir=LR;", '  node [shape=circle, fontsize=10];']
    for i in range(ts.state_count):
        attrs = []
        names = [format_predicate(ts.predicates[k]) for k in sorted(ts.labels[i])]
        label = str(i) if not names else str(i) + "\\n" + "\\n".join(names)
        attrs.append(f'label="{label}"')
        if i == ts.initial:
            attrs.append("penwidth=2")
        if i in ts.deadlocks:
            attrs.append('style=filled fillcolor="#dddddd"')
        lines.append(f"  s{i} [{', '.join(attrs)}];")
    for a, b in sorted(ts.transitions):
        lines.append(f"  s{a} -> s{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
