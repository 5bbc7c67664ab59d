"""Parser and validator for the statement-per-line agent source format.

Grammar (statements end with '.', '//' comments run to end of line):

    belief b.
    assert-not b.
    event e [id].
    motivation formula ~> e [id].
    plan e : formula <- body.
    action a : formula <- +{adds} -{dels}.

    formula := and ('|' and)*            and := unary ('&' unary)*
    unary   := '~' unary | 'true' | atom | '(' formula ')'
    body    := seq ('||' seq)*           seq := elem (';' elem)*
    elem    := 'nil' | action | '!' event | goal(formula, event, formula) | '(' body ')'

';' binds tighter than '||'; both associate to the right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lang import (
    Act,
    ActionDecl,
    And,
    Atom,
    CanrtError,
    CompiledAgent,
    Event,
    Formula,
    Goal,
    MotivationDecl,
    NIL,
    Not,
    Or,
    Par,
    PlanBody,
    PlanDecl,
    Seq,
    TRUE,
    body_actions,
    body_events,
)

KEYWORDS = frozenset(
    ["belief", "assert-not", "event", "motivation", "plan", "action", "goal", "nil", "true"]
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<assertnot>assert-not\b)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct><-|~>|\|\||[.:;,~&|!()\[\]{}+-])
    """,
    re.VERBOSE,
)


class ParseError(CanrtError):
    """Syntax error with source position; str() renders file:line:col: message."""

    def __init__(self, filename: str, line: int, col: int, message: str, expected: frozenset[str] = frozenset()):
        self.filename = filename
        self.line = line
        self.col = col
        self.message = message
        self.expected = expected
        super().__init__(f"{filename}:{line}:{col}: {message}")


class ValidationError(CanrtError):
    """A structurally well-formed program that breaks a static rule."""

    def __init__(self, filename: str, line: int, message: str):
        self.filename = filename
        self.line = line
        self.message = message
        super().__init__(f"{filename}:{line}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str   # "ident" | "punct" | "kw" | "eof"
    value: str
    line: int
    col: int


def tokenize(source: str, filename: str = "<string>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            col = pos - line_start + 1
            raise ParseError(filename, line, col, f"unexpected character {source[pos]!r}")
        text = m.group(0)
        col = pos - line_start + 1
        if m.lastgroup == "ident":
            kind = "kw" if text in KEYWORDS else "ident"
            tokens.append(Token(kind, text, line, col))
        elif m.lastgroup == "assertnot":
            tokens.append(Token("kw", text, line, col))
        elif m.lastgroup == "punct":
            tokens.append(Token("punct", text, line, col))
        # whitespace and comments advance position only
        nl = text.count("\n")
        if nl:
            line += nl
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, len(source) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], filename: str):
        self.tokens = tokens
        self.filename = filename
        self.i = 0

    def _cur(self) -> Token:
        return self.tokens[self.i]

    def _advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _error(self, message: str, expected: frozenset[str] = frozenset()) -> ParseError:
        tok = self._cur()
        return ParseError(self.filename, tok.line, tok.col, message, expected)

    def _expect(self, value: str) -> Token:
        tok = self._cur()
        if (tok.kind in ("punct", "kw") and tok.value == value):
            return self._advance()
        shown = tok.value if tok.kind != "eof" else "end of input"
        raise self._error(f"expected {value!r}, found {shown!r}", frozenset((value,)))

    def _expect_ident(self, what: str) -> Token:
        tok = self._cur()
        if tok.kind == "ident":
            return self._advance()
        if tok.kind == "kw":
            raise self._error(f"{tok.value!r} is a reserved word, expected {what}", frozenset(("identifier",)))
        shown = tok.value if tok.kind != "eof" else "end of input"
        raise self._error(f"expected {what}, found {shown!r}", frozenset(("identifier",)))

    # ── statements ────────────────────────────────────────────────────

    def parse_program(self) -> _Draft:
        draft = _Draft(self.filename)
        while self._cur().kind != "eof":
            tok = self._cur()
            if tok.kind != "kw":
                raise self._error(
                    f"expected a declaration keyword, found {tok.value!r}",
                    frozenset(("belief", "assert-not", "event", "motivation", "plan", "action")),
                )
            if tok.value == "belief":
                self._advance()
                name = self._expect_ident("an atom name")
                self._expect(".")
                draft.beliefs.append((name.value, name.line))
            elif tok.value == "assert-not":
                self._advance()
                name = self._expect_ident("an atom name")
                self._expect(".")
                draft.negations.append((name.value, name.line))
            elif tok.value == "event":
                self._advance()
                name = self._expect_ident("an event name")
                self._expect("[")
                ident = self._expect_ident("an identifier")
                self._expect("]")
                self._expect(".")
                draft.events.append((name.value, ident.value, name.line))
            elif tok.value == "motivation":
                self._advance()
                cond = self.parse_formula()
                self._expect("~>")
                name = self._expect_ident("an event name")
                self._expect("[")
                ident = self._expect_ident("an identifier")
                self._expect("]")
                self._expect(".")
                draft.motivations.append(MotivationDecl(cond, name.value, ident.value, tok.line))
            elif tok.value == "plan":
                self._advance()
                name = self._expect_ident("an event name")
                self._expect(":")
                ctx = self.parse_formula()
                self._expect("<-")
                body = self.parse_body()
                self._expect(".")
                label = f"P{len(draft.plans) + 1}"
                draft.plans.append(PlanDecl(name.value, ctx, body, label, tok.line))
            elif tok.value == "action":
                self._advance()
                name = self._expect_ident("an action name")
                self._expect(":")
                pre = self.parse_formula()
                self._expect("<-")
                self._expect("+")
                adds = self._parse_atom_set()
                self._expect("-")
                dels = self._parse_atom_set()
                self._expect(".")
                draft.actions.append(ActionDecl(name.value, pre, frozenset(adds), frozenset(dels), tok.line))
            else:
                raise self._error(
                    f"{tok.value!r} cannot start a declaration",
                    frozenset(("belief", "assert-not", "event", "motivation", "plan", "action")),
                )
        return draft

    def _parse_atom_set(self) -> list[str]:
        self._expect("{")
        atoms: list[str] = []
        if self._cur().kind == "ident":
            atoms.append(self._advance().value)
            while self._cur().value == "," and self._cur().kind == "punct":
                self._advance()
                atoms.append(self._expect_ident("an atom name").value)
        self._expect("}")
        return atoms

    # ── formulas ──────────────────────────────────────────────────────

    def parse_formula(self) -> Formula:
        left = self._parse_and()
        if self._cur().kind == "punct" and self._cur().value == "|":
            self._advance()
            return Or(left, self.parse_formula())
        return left

    def _parse_and(self) -> Formula:
        left = self._parse_unary()
        if self._cur().kind == "punct" and self._cur().value == "&":
            self._advance()
            return And(left, self._parse_and())
        return left

    def _parse_unary(self) -> Formula:
        tok = self._cur()
        if tok.kind == "punct" and tok.value == "~":
            self._advance()
            return Not(self._parse_unary())
        if tok.kind == "kw" and tok.value == "true":
            self._advance()
            return TRUE
        if tok.kind == "punct" and tok.value == "(":
            self._advance()
            inner = self.parse_formula()
            self._expect(")")
            return inner
        if tok.kind == "ident":
            self._advance()
            return Atom(tok.value)
        shown = tok.value if tok.kind != "eof" else "end of input"
        raise self._error(f"expected a formula, found {shown!r}", frozenset(("atom", "~", "(", "true")))

    # ── plan bodies ───────────────────────────────────────────────────

    def parse_body(self) -> PlanBody:
        left = self._parse_seq()
        if self._cur().kind == "punct" and self._cur().value == "||":
            self._advance()
            return Par(left, self.parse_body())
        return left

    def _parse_seq(self) -> PlanBody:
        left = self._parse_elem()
        if self._cur().kind == "punct" and self._cur().value == ";":
            self._advance()
            return Seq(left, self._parse_seq())
        return left

    def _parse_elem(self) -> PlanBody:
        tok = self._cur()
        if tok.kind == "kw" and tok.value == "nil":
            self._advance()
            return NIL
        if tok.kind == "punct" and tok.value == "!":
            self._advance()
            name = self._expect_ident("an event name")
            return Event(name.value)
        if tok.kind == "kw" and tok.value == "goal":
            self._advance()
            self._expect("(")
            success = self.parse_formula()
            self._expect(",")
            event = self._expect_ident("an event name")
            self._expect(",")
            failure = self.parse_formula()
            self._expect(")")
            return Goal(success, Event(event.value), failure)
        if tok.kind == "punct" and tok.value == "(":
            self._advance()
            inner = self.parse_body()
            self._expect(")")
            return inner
        if tok.kind == "ident":
            self._advance()
            return Act(tok.value)
        shown = tok.value if tok.kind != "eof" else "end of input"
        raise self._error(
            f"expected a plan-body element, found {shown!r}",
            frozenset(("action", "!", "goal", "nil", "(")),
        )


def parse_formula_text(text: str, filename: str = "<formula>") -> Formula:
    """Parse a standalone belief formula (used by predicates and tools)."""
    p = _Parser(tokenize(text, filename), filename)
    f = p.parse_formula()
    if p._cur().kind != "eof":
        raise p._error(f"trailing input after formula: {p._cur().value!r}")
    return f


class _Draft:
    """Parsed but not yet validated declarations, in file order."""

    def __init__(self, filename: str):
        self.filename = filename
        self.beliefs: list[tuple[str, int]] = []
        self.negations: list[tuple[str, int]] = []
        self.events: list[tuple[str, str, int]] = []
        self.motivations: list[MotivationDecl] = []
        self.plans: list[PlanDecl] = []
        self.actions: list[ActionDecl] = []


def parse_program(source: str, filename: str = "<string>") -> CompiledAgent:
    """Parse and validate agent source. Raises ParseError or ValidationError."""
    draft = _Parser(tokenize(source, filename), filename).parse_program()
    return _validate(draft)


def _validate(d: _Draft) -> CompiledAgent:
    f = d.filename

    action_names: dict[str, int] = {}
    for a in d.actions:
        if a.name in action_names:
            raise ValidationError(f, a.line, f"duplicate action declaration {a.name!r}")
        action_names[a.name] = a.line
        overlap = a.adds & a.dels
        if overlap:
            names = ", ".join(sorted(overlap))
            raise ValidationError(f, a.line, f"action {a.name!r} both adds and deletes: {names}")

    event_names = {e for e, _, _ in d.events}
    event_names.update(m.event for m in d.motivations)
    event_names.update(p.event for p in d.plans)

    both = event_names & set(action_names)
    if both:
        name = sorted(both)[0]
        raise ValidationError(f, 0, f"{name!r} is declared as both an action and an event")

    identifiers: dict[str, int] = {}
    for e, ident, line in d.events:
        if ident in identifiers:
            raise ValidationError(f, line, f"duplicate identifier {ident!r}")
        identifiers[ident] = line
    for m in d.motivations:
        if m.identifier in identifiers:
            raise ValidationError(f, m.line, f"duplicate identifier {m.identifier!r}")
        identifiers[m.identifier] = m.line

    positive = {b for b, _ in d.beliefs}
    for b, line in d.negations:
        if b in positive:
            raise ValidationError(f, line, f"assert-not {b!r} contradicts an initial belief")

    for p in d.plans:
        for name in sorted(body_actions(p.body)):
            if name not in action_names:
                hint = ""
                if name in event_names:
                    hint = f" (did you mean !{name}?)"
                raise ValidationError(f, p.line, f"undeclared action {name!r} in plan body{hint}")
        for name in sorted(body_events(p.body)):
            if name not in event_names:
                raise ValidationError(f, p.line, f"undeclared event {name!r} in plan body")

    _reject_recursion(d, f)

    return CompiledAgent(
        initial_beliefs=frozenset(b for b, _ in d.beliefs),
        negative_assertions=frozenset(b for b, _ in d.negations),
        external_events=tuple((e, i) for e, i, _ in d.events),
        plans=tuple(d.plans),
        actions=tuple(d.actions),
        motivations=tuple(d.motivations),
    )


def _reject_recursion(d: _Draft, filename: str) -> None:
    """The event -> plan -> event reachability graph must be acyclic.

    Recursion would make the compiled trace set infinite, so it is a static error.
    """
    edges: dict[str, set[str]] = {}
    for p in d.plans:
        edges.setdefault(p.event, set()).update(body_events(p.body))

    WHITE, GREY, BLACK = 0, 1, 2
    color: dict[str, int] = {}
    stack_path: list[str] = []

    def visit(node: str) -> None:
        color[node] = GREY
        stack_path.append(node)
        for nxt in sorted(edges.get(node, ())):
            c = color.get(nxt, WHITE)
            if c == GREY:
                cycle = stack_path[stack_path.index(nxt):] + [nxt]
                line = min((p.line for p in d.plans if p.event == nxt), default=0)
                raise ValidationError(
                    filename, line, "recursive plan graph: " + " -> ".join(cycle)
                )
            if c == WHITE:
                visit(nxt)
        stack_path.pop()
        color[node] = BLACK

    for node in sorted(edges):
        if color.get(node, WHITE) == WHITE:
            visit(node)
