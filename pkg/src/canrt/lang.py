"""Core terms of the agent language: belief formulas, plan bodies, declarations.

Everything here is an immutable value. Plan bodies double as runtime programs:
the parser only ever produces the six surface constructs (Nil, Act, Event, Seq,
Par, Goal); SelectSet and Recover appear when the stepper expands an event into
its applicable plans and records what to fall back to.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property


class CanrtError(Exception):
    """Base class for all diagnostics raised by this package."""


# ── formulas ──────────────────────────────────────────────────────────────

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Truth(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


TRUE = Truth()

_FORMULA_PREC = {Or: 1, And: 2, Not: 3, Atom: 4, Truth: 4}


def formula_atoms(f: Formula) -> frozenset[str]:
    match f:
        case Atom(name):
            return frozenset((name,))
        case Not(sub):
            return formula_atoms(sub)
        case And(l, r) | Or(l, r):
            return formula_atoms(l) | formula_atoms(r)
        case Truth():
            return frozenset()
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula, parent_prec: int = 0) -> str:
    """Render a formula in surface syntax with minimal structure-preserving parens."""
    prec = _FORMULA_PREC[type(f)]
    match f:
        case Truth():
            text = "true"
        case Atom(name):
            text = name
        case Not(sub):
            text = "~" + format_formula(sub, prec)
        case And(l, r):
            # right-associative: a left child of equal precedence needs parens
            text = format_formula(l, prec + 1) + " & " + format_formula(r, prec)
        case Or(l, r):
            text = format_formula(l, prec + 1) + " | " + format_formula(r, prec)
        case _:
            raise TypeError(f"not a formula: {f!r}")
    if prec < parent_prec:
        return "(" + text + ")"
    return text


# ── plan bodies ───────────────────────────────────────────────────────────

class PlanBody:
    __slots__ = ()


@dataclass(frozen=True)
class Nil(PlanBody):
    pass


@dataclass(frozen=True)
class Act(PlanBody):
    name: str


@dataclass(frozen=True)
class Event(PlanBody):
    name: str


@dataclass(frozen=True)
class Seq(PlanBody):
    first: PlanBody
    rest: PlanBody


@dataclass(frozen=True)
class Par(PlanBody):
    left: PlanBody
    right: PlanBody


@dataclass(frozen=True)
class Goal(PlanBody):
    success: Formula
    body: PlanBody   # Event(e) as written; Recover(current, original) once running
    failure: Formula


@dataclass(frozen=True)
class PlanChoice:
    """One not-yet-tried plan for an event, as carried by SelectSet."""

    context: Formula
    body: PlanBody
    label: str


@dataclass(frozen=True)
class SelectSet(PlanBody):
    event: str
    remaining: tuple[PlanChoice, ...]


@dataclass(frozen=True)
class Recover(PlanBody):
    body: PlanBody
    alternative: PlanBody


NIL = Nil()

_BODY_PREC = {Par: 1, Seq: 2}


def format_body(p: PlanBody, parent_prec: int = 0) -> str:
    """Render a plan body. Runtime constructs get an ASCII rendering of their own."""
    match p:
        case Nil():
            text, prec = "nil", 9
        case Act(name):
            text, prec = name, 9
        case Event(name):
            text, prec = "!" + name, 9
        case Goal(s, body, f):
            inner = format_body(body, 0)
            if isinstance(body, Event):
                inner = body.name  # surface form names the event bare
            text = f"goal({format_formula(s)}, {inner}, {format_formula(f)})"
            prec = 9
        case Seq(a, b):
            prec = _BODY_PREC[Seq]
            text = format_body(a, prec + 1) + "; " + format_body(b, prec)
        case Par(a, b):
            prec = _BODY_PREC[Par]
            text = format_body(a, prec + 1) + " || " + format_body(b, prec)
        case SelectSet(event, remaining):
            labels = ",".join(c.label for c in remaining)
            text, prec = f"plans({event}: {labels})", 9
        case Recover(body, alt):
            prec = 0
            text = f"{format_body(body, 1)} |> {format_body(alt, 1)}"
        case _:
            raise TypeError(f"not a plan body: {p!r}")
    if prec < parent_prec:
        return "(" + text + ")"
    return text


def body_events(p: PlanBody) -> frozenset[str]:
    """Event names referenced by a body (sub-event posts and goal events)."""
    match p:
        case Event(name):
            return frozenset((name,))
        case Seq(a, b) | Par(a, b):
            return body_events(a) | body_events(b)
        case Goal(_, body, _):
            return body_events(body)
        case Recover(a, b):
            return body_events(a) | body_events(b)
        case SelectSet(_, remaining):
            out: frozenset[str] = frozenset()
            for c in remaining:
                out |= body_events(c.body)
            return out
        case _:
            return frozenset()


def body_actions(p: PlanBody) -> frozenset[str]:
    match p:
        case Act(name):
            return frozenset((name,))
        case Seq(a, b) | Par(a, b):
            return body_actions(a) | body_actions(b)
        case Goal(_, body, _):
            return body_actions(body)
        case Recover(a, b):
            return body_actions(a) | body_actions(b)
        case _:
            return frozenset()


# ── declarations ──────────────────────────────────────────────────────────

@dataclass(frozen=True)
class PlanDecl:
    event: str
    context: Formula
    body: PlanBody
    label: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ActionDecl:
    name: str
    pre: Formula
    adds: frozenset[str]
    dels: frozenset[str]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class MotivationDecl:
    condition: Formula
    event: str
    identifier: str
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CompiledAgent:
    """A validated agent program.

    Plan order is meaningful: it fixes plan labels (P1..Pn in file order) and
    the canonical enumeration order everywhere plans are tried.
    """

    initial_beliefs: frozenset[str]
    negative_assertions: frozenset[str]
    external_events: tuple[tuple[str, str], ...]  # (event, identifier)
    plans: tuple[PlanDecl, ...]
    actions: tuple[ActionDecl, ...]
    motivations: tuple[MotivationDecl, ...]

    @cached_property
    def _actions_by_name(self) -> dict[str, ActionDecl]:
        return {a.name: a for a in self.actions}

    @cached_property
    def _plans_by_event(self) -> dict[str, tuple[PlanDecl, ...]]:
        out: dict[str, list[PlanDecl]] = {}
        for p in self.plans:
            out.setdefault(p.event, []).append(p)
        return {e: tuple(ps) for e, ps in out.items()}

    def action(self, name: str) -> ActionDecl:
        return self._actions_by_name[name]

    def plans_for(self, event: str) -> tuple[PlanDecl, ...]:
        return self._plans_by_event.get(event, ())

    @cached_property
    def event_names(self) -> frozenset[str]:
        names = {e for e, _ in self.external_events}
        names.update(m.event for m in self.motivations)
        names.update(p.event for p in self.plans)
        return frozenset(names)

    @cached_property
    def declared_identifiers(self) -> frozenset[str]:
        ids = {i for _, i in self.external_events}
        ids.update(m.identifier for m in self.motivations)
        return frozenset(ids)

    @cached_property
    def atom_universe(self) -> frozenset[str]:
        atoms = set(self.initial_beliefs) | set(self.negative_assertions)
        for p in self.plans:
            atoms |= formula_atoms(p.context)
            atoms |= _body_atoms(p.body)
        for a in self.actions:
            atoms |= formula_atoms(a.pre) | a.adds | a.dels
        for m in self.motivations:
            atoms |= formula_atoms(m.condition)
        return frozenset(atoms)


def _body_atoms(p: PlanBody) -> frozenset[str]:
    match p:
        case Goal(s, body, f):
            return formula_atoms(s) | formula_atoms(f) | _body_atoms(body)
        case Seq(a, b) | Par(a, b):
            return _body_atoms(a) | _body_atoms(b)
        case _:
            return frozenset()


def format_agent(agent: CompiledAgent) -> str:
    """Regenerate source text. parse(format_agent(a)) is structurally equal to a."""
    lines: list[str] = []
    for b in sorted(agent.initial_beliefs):
        lines.append(f"belief {b}.")
    for b in sorted(agent.negative_assertions):
        lines.append(f"assert-not {b}.")
    for event, ident in agent.external_events:
        lines.append(f"event {event} [{ident}].")
    for m in agent.motivations:
        lines.append(f"motivation {format_formula(m.condition)} ~> {m.event} [{m.identifier}].")
    for p in agent.plans:
        lines.append(f"plan {p.event} : {format_formula(p.context)} <- {format_body(p.body)}.")
    for a in agent.actions:
        adds = ", ".join(sorted(a.adds))
        dels = ", ".join(sorted(a.dels))
        lines.append(f"action {a.name} : {format_formula(a.pre)} <- +{{{adds}}} -{{{dels}}}.")
    return "\n".join(lines) + "\n"


# ── canonical keys ────────────────────────────────────────────────────────
# Compact injective serializations, used for state canonicalization and
# projection equality. Stable across processes (no hash() involvement).

def formula_key(f: Formula) -> str:
    match f:
        case Truth():
            return "T"
        case Atom(name):
            return name
        case Not(sub):
            return f"~({formula_key(sub)})"
        case And(l, r):
            return f"&({formula_key(l)},{formula_key(r)})"
        case Or(l, r):
            return f"|({formula_key(l)},{formula_key(r)})"
    raise TypeError(f"not a formula: {f!r}")


def body_key(p: PlanBody) -> str:
    match p:
        case Nil():
            return "0"
        case Act(name):
            return f"a:{name}"
        case Event(name):
            return f"e:{name}"
        case Seq(a, b):
            return f"seq({body_key(a)},{body_key(b)})"
        case Par(a, b):
            return f"par({body_key(a)},{body_key(b)})"
        case Goal(s, body, f):
            return f"goal({formula_key(s)},{body_key(body)},{formula_key(f)})"
        case SelectSet(event, remaining):
            entries = ";".join(f"{c.label}:{formula_key(c.context)}:{body_key(c.body)}" for c in remaining)
            return f"sel({event}|{entries})"
        case Recover(a, b):
            return f"rec({body_key(a)},{body_key(b)})"
    raise TypeError(f"not a plan body: {p!r}")
