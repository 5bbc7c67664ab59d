"""Operational semantics: intention-level steps and agent-level rule families.

Agent configurations are triples of event records, beliefs, and intentions
(plus the set of already-fired motivation rules, which fire at most once per
run). Two agent-level rule families share the intention stepper:

  agent_successors(..)          status-tracking rules: adopting an external
                                event flips its record pending -> active and
                                keeps it; finished intentions flip it to
                                success (body Nil) or failure (blocked);
                                motivation rules raise new active events.
  agent_successors(.., legacy=True)
                                the classical rules: adoption deletes the
                                record, unprogressable intentions are dropped
                                silently, no motivations.

Intention bodies evolve by the small-step rules in _body_steps; each step also
reports the trace bookkeeping it implies so progress estimates stay current.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .beliefs import BeliefBase, apply_effects, entails
from .lang import (
    Act,
    CanrtError,
    CompiledAgent,
    Event,
    Goal,
    NIL,
    Nil,
    Par,
    PlanBody,
    PlanChoice,
    Recover,
    SelectSet,
    Seq,
)
from .progress import (
    AppendOp,
    CurrentTrace,
    TraceDesync,
    TraceOp,
    TruncateOp,
    apply_trace_ops,
    compile_traces,
)

PENDING = "pending"
ACTIVE = "active"
SUCCESS = "success"
FAILURE = "failure"

STATUSES = (PENDING, ACTIVE, SUCCESS, FAILURE)


class InvariantViolation(CanrtError):
    """A configuration or step broke a structural invariant; this is a bug trap."""


@dataclass(frozen=True)
class EventRecord:
    event: str
    identifier: str
    status: str


@dataclass(frozen=True)
class Intention:
    body: PlanBody
    identifier: str
    trace: CurrentTrace


@dataclass(frozen=True)
class AgentConfig:
    events: frozenset[EventRecord]
    beliefs: BeliefBase
    intentions: frozenset[Intention]
    fired_motivations: frozenset[str]


def initial_config(agent: CompiledAgent) -> AgentConfig:
    return AgentConfig(
        events=frozenset(EventRecord(e, i, PENDING) for e, i in agent.external_events),
        beliefs=frozenset(agent.initial_beliefs),
        intentions=frozenset(),
        fired_motivations=frozenset(),
    )


# ── intention-level rules ─────────────────────────────────────────────────

@dataclass(frozen=True)
class BodyStep:
    beliefs: BeliefBase
    body: PlanBody
    rule: str
    trace_ops: tuple[TraceOp, ...]


def _fallback_truncation(alternative: PlanBody) -> tuple[TraceOp, ...]:
    # Falling back to the event's remaining plans keeps the event element
    # (re-selection appends a plan); falling back to a re-posted event drops
    # it (the event rule will re-append it).
    if isinstance(alternative, SelectSet):
        return (TruncateOp(alternative.event, inclusive=True),)
    if isinstance(alternative, Event):
        return (TruncateOp(alternative.name, inclusive=False),)
    return ()


def _body_steps(agent: CompiledAgent, beliefs: BeliefBase, body: PlanBody) -> list[BodyStep]:
    match body:
        case Nil():
            return []

        case Act(name):
            # act: execute when the precondition is entailed
            decl = agent.action(name)
            if entails(beliefs, decl.pre):
                after = apply_effects(beliefs, decl.adds, decl.dels)
                return [BodyStep(after, NIL, f"act:{name}", (AppendOp("action", name),))]
            return []

        case Event(name):
            # event: expand into the set of this event's plans
            choices = tuple(PlanChoice(p.context, p.body, p.label) for p in agent.plans_for(name))
            return [BodyStep(beliefs, SelectSet(name, choices), f"event:{name}", (AppendOp("event", name),))]

        case SelectSet(event, remaining):
            # select: any applicable plan, keeping the rest for recovery
            out = []
            for i, choice in enumerate(remaining):
                if entails(beliefs, choice.context):
                    rest = remaining[:i] + remaining[i + 1:]
                    out.append(
                        BodyStep(
                            beliefs,
                            Recover(choice.body, SelectSet(event, rest)),
                            f"select:{choice.label}",
                            (AppendOp("plan", choice.label),),
                        )
                    )
            return out

        case Seq(first, rest):
            if isinstance(first, Nil):
                return [BodyStep(beliefs, rest, "seq_done", ())]
            return [replace(s, body=Seq(s.body, rest)) for s in _body_steps(agent, beliefs, first)]

        case Par(left, right):
            if isinstance(left, Nil) and isinstance(right, Nil):
                return [BodyStep(beliefs, NIL, "par_done", ())]
            out = [replace(s, body=Par(s.body, right)) for s in _body_steps(agent, beliefs, left)]
            out += [replace(s, body=Par(left, s.body)) for s in _body_steps(agent, beliefs, right)]
            return out

        case Recover(inner, alternative):
            if isinstance(inner, Nil):
                return [BodyStep(beliefs, NIL, "recover_done", ())]
            steps = _body_steps(agent, beliefs, inner)
            if steps:
                return [replace(s, body=Recover(s.body, alternative)) for s in steps]
            # inner is blocked: discard it in favor of the alternative
            return [BodyStep(beliefs, alternative, "recover_fail", _fallback_truncation(alternative))]

        case Goal(success, inner, failure):
            if entails(beliefs, success):
                return [BodyStep(beliefs, NIL, "goal_succ", ())]
            if entails(beliefs, failure):
                return []  # goal blocked outright; recovery above may catch it
            if isinstance(inner, Event):
                wrapped = Recover(inner, inner)
                return [BodyStep(beliefs, Goal(success, wrapped, failure), "goal_init", ())]
            if isinstance(inner, Recover):
                if isinstance(inner.body, Nil):
                    # the chosen execution ran dry without reaching success:
                    # persist by restarting from the original event
                    restart = Recover(inner.alternative, inner.alternative)
                    ops = _fallback_truncation(inner.alternative)
                    return [BodyStep(beliefs, Goal(success, restart, failure), "goal_restart", ops)]
                return [
                    replace(s, body=Goal(success, s.body, failure))
                    for s in _body_steps(agent, beliefs, inner)
                ]
            raise InvariantViolation(f"goal body must be an event or its recovery wrap: {inner!r}")

    raise TypeError(f"not a plan body: {body!r}")


def intention_step(agent: CompiledAgent, beliefs: BeliefBase, body: PlanBody) -> set[tuple[BeliefBase, PlanBody]]:
    """The plain relation: successor (beliefs, body) pairs of one intention."""
    return {(s.beliefs, s.body) for s in _body_steps(agent, beliefs, body)}


def is_blocked(agent: CompiledAgent, beliefs: BeliefBase, body: PlanBody) -> bool:
    """No intention-level rule applies. Nil is blocked; the body tells success from failure."""
    return not _body_steps(agent, beliefs, body)


# ── agent-level rules ─────────────────────────────────────────────────────

@dataclass(frozen=True)
class AgentSuccessor:
    config: AgentConfig
    rule: str        # a_event | a_motive | a_step | a_update_suc | a_update_fail | a_update
    identifier: str
    detail: str      # intention-level rule name, event name, etc.
    attention: tuple[tuple[str, str], ...] = ()  # (event, identifier) raised by a_motive


def _sorted_records(cfg: AgentConfig) -> list[EventRecord]:
    return sorted(cfg.events, key=lambda r: r.identifier)


def _sorted_intentions(cfg: AgentConfig) -> list[Intention]:
    return sorted(cfg.intentions, key=lambda i: i.identifier)


def _record_for(cfg: AgentConfig, identifier: str) -> EventRecord | None:
    for r in cfg.events:
        if r.identifier == identifier:
            return r
    return None


def agent_successors(
    agent: CompiledAgent, cfg: AgentConfig, *, legacy: bool = False
) -> list[AgentSuccessor]:
    """All rule applications enabled in cfg, in canonical order.

    The order (event adoption, motivations, intention steps, completions,
    failures; identifiers sorted within each group) is what the fifo execution
    policy and the exploration numbering rely on.
    """
    table = compile_traces(agent)
    out: list[AgentSuccessor] = []

    # adopt pending events
    for rec in _sorted_records(cfg):
        if rec.status != PENDING:
            continue
        intention = Intention(Event(rec.event), rec.identifier, CurrentTrace(rec.event))
        if legacy:
            events = cfg.events - {rec}
        else:
            events = (cfg.events - {rec}) | {replace(rec, status=ACTIVE)}
        nxt = replace(cfg, events=events, intentions=cfg.intentions | {intention})
        out.append(AgentSuccessor(nxt, "a_event", rec.identifier, rec.event))

    # fire motivation rules (status-tracking semantics only)
    if not legacy:
        for m in agent.motivations:
            if m.identifier in cfg.fired_motivations:
                continue
            if _record_for(cfg, m.identifier) is not None:
                continue
            if not entails(cfg.beliefs, m.condition):
                continue
            intention = Intention(Event(m.event), m.identifier, CurrentTrace(m.event))
            nxt = AgentConfig(
                events=cfg.events | {EventRecord(m.event, m.identifier, ACTIVE)},
                beliefs=cfg.beliefs,
                intentions=cfg.intentions | {intention},
                fired_motivations=cfg.fired_motivations | {m.identifier},
            )
            out.append(
                AgentSuccessor(nxt, "a_motive", m.identifier, m.event, ((m.event, m.identifier),))
            )

    # progress intentions
    for intent in _sorted_intentions(cfg):
        for step in _body_steps(agent, cfg.beliefs, intent.body):
            try:
                trace = apply_trace_ops(intent.trace, step.trace_ops, table)
            except TraceDesync:
                # Interleaved branches posting the same event can strand the
                # linearized trace with no consistent instance left. Estimation
                # is best-effort: fall back to the bare root element so the
                # ratio collapses to its coarse band instead of halting the
                # agent.
                trace = CurrentTrace(intent.trace.root, intent.trace.elements[:1])
            nxt_intent = Intention(step.body, intent.identifier, trace)
            nxt = replace(
                cfg,
                beliefs=step.beliefs,
                intentions=(cfg.intentions - {intent}) | {nxt_intent},
            )
            out.append(AgentSuccessor(nxt, "a_step", intent.identifier, step.rule))

    if legacy:
        # drop any unprogressable intention, successful or not, silently
        for intent in _sorted_intentions(cfg):
            if is_blocked(agent, cfg.beliefs, intent.body):
                nxt = replace(cfg, intentions=cfg.intentions - {intent})
                out.append(AgentSuccessor(nxt, "a_update", intent.identifier, "drop"))
        return out

    # record success: body ran to Nil
    for intent in _sorted_intentions(cfg):
        if not isinstance(intent.body, Nil):
            continue
        rec = _record_for(cfg, intent.identifier)
        if rec is None or rec.status != ACTIVE:
            raise InvariantViolation(f"intention {intent.identifier!r} finished without an active record")
        nxt = replace(
            cfg,
            events=(cfg.events - {rec}) | {replace(rec, status=SUCCESS)},
            intentions=cfg.intentions - {intent},
        )
        out.append(AgentSuccessor(nxt, "a_update_suc", intent.identifier, intent.trace.root))

    # record failure: blocked with work remaining
    for intent in _sorted_intentions(cfg):
        if isinstance(intent.body, Nil) or not is_blocked(agent, cfg.beliefs, intent.body):
            continue
        rec = _record_for(cfg, intent.identifier)
        if rec is None or rec.status != ACTIVE:
            raise InvariantViolation(f"intention {intent.identifier!r} blocked without an active record")
        nxt = replace(
            cfg,
            events=(cfg.events - {rec}) | {replace(rec, status=FAILURE)},
            intentions=cfg.intentions - {intent},
        )
        out.append(AgentSuccessor(nxt, "a_update_fail", intent.identifier, intent.trace.root))

    return out


def agent_step(agent: CompiledAgent, cfg: AgentConfig) -> set[AgentConfig]:
    """Successor configurations under the status-tracking rules, as a set."""
    return {s.config for s in agent_successors(agent, cfg)}


def agent_step_legacy(agent: CompiledAgent, cfg: AgentConfig) -> set[AgentConfig]:
    """Successor configurations under the classical rules (no statuses kept)."""
    return {s.config for s in agent_successors(agent, cfg, legacy=True)}


def check_config(agent: CompiledAgent, cfg: AgentConfig) -> None:
    """Raise InvariantViolation on malformed configurations (new semantics)."""
    seen: dict[str, EventRecord] = {}
    for rec in cfg.events:
        if rec.status not in STATUSES:
            raise InvariantViolation(f"unknown status {rec.status!r}")
        if rec.identifier in seen:
            raise InvariantViolation(f"two event records share identifier {rec.identifier!r}")
        seen[rec.identifier] = rec
    intent_ids = set()
    for intent in cfg.intentions:
        if intent.identifier in intent_ids:
            raise InvariantViolation(f"two intentions share identifier {intent.identifier!r}")
        intent_ids.add(intent.identifier)
        rec = seen.get(intent.identifier)
        if rec is None or rec.status != ACTIVE:
            raise InvariantViolation(
                f"intention {intent.identifier!r} lacks an active event record"
            )
