"""CTL parsing and fixed-point model checking over explored transition systems.

Formulas quantify over the infinite paths of a totalized system (exploration
gives every deadlock a self-loop). The checker computes satisfaction sets
bottom-up: EX by pre-image, EU as a least fixed point, EG as a greatest fixed
point, and the universal operators through their dualities. A failing AG/AF
property at the initial state yields a witness path.

Property files are line-oriented: `name: formula`, '#' comments. The surface
syntax `A[p => F q]` is sugar for AG(p -> AF q).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .lang import CanrtError
from .parser import ParseError, parse_formula_text
from .explorer import (
    BeliefHolds,
    DesireContains,
    EventStatus,
    IntentionBlocked,
    IntentionCompleted,
    Predicate,
    ProgressAtLeast,
    TransitionSystem,
    UnknownLabel,
    format_predicate,
)
from .semantics import STATUSES


# ── formula terms ─────────────────────────────────────────────────────────

class CtlFormula:
    __slots__ = ()


@dataclass(frozen=True)
class CtlTrue(CtlFormula):
    pass


@dataclass(frozen=True)
class Label(CtlFormula):
    predicate: Predicate


@dataclass(frozen=True)
class CtlNot(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class CtlAnd(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlOr(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class CtlImplies(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class EX(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class AX(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class EF(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class AF(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class EG(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class AG(CtlFormula):
    sub: CtlFormula


@dataclass(frozen=True)
class EU(CtlFormula):
    left: CtlFormula
    right: CtlFormula


@dataclass(frozen=True)
class AU(CtlFormula):
    left: CtlFormula
    right: CtlFormula


def collect_predicates(f: CtlFormula) -> tuple[Predicate, ...]:
    """All predicates in f, first occurrence first, deduplicated."""
    out: list[Predicate] = []

    def walk(g: CtlFormula) -> None:
        match g:
            case Label(p):
                if p not in out:
                    out.append(p)
            case CtlNot(s) | EX(s) | AX(s) | EF(s) | AF(s) | EG(s) | AG(s):
                walk(s)
            case CtlAnd(l, r) | CtlOr(l, r) | CtlImplies(l, r) | EU(l, r) | AU(l, r):
                walk(l)
                walk(r)
            case CtlTrue():
                pass
            case _:
                raise TypeError(f"not a CTL formula: {g!r}")

    walk(f)
    return tuple(out)


# ── parsing ───────────────────────────────────────────────────────────────

_CTL_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>\d+(?:\.\d+)?(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>->|=>|>=|\|\||&&|[=!&|()\[\],~])
    """,
    re.VERBOSE,
)

_PREDICATE_HEADS = frozenset(["status", "completed", "blocked", "believes", "desires", "progress"])


class _CtlParser:
    def __init__(self, text: str, filename: str = "<property>"):
        self.text = text
        self.filename = filename
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _CTL_TOKEN_RE.match(text, pos)
            if m is None:
                raise ParseError(filename, 1, pos + 1, f"unexpected character {text[pos]!r}")
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(0), pos + 1))
            pos = m.end()
        self.tokens.append(("eof", "", len(text) + 1))
        self.i = 0

    def _cur(self):
        return self.tokens[self.i]

    def _advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _error(self, message: str) -> ParseError:
        kind, value, col = self._cur()
        shown = value if kind != "eof" else "end of input"
        return ParseError(self.filename, 1, col, f"{message}, found {shown!r}")

    def _expect(self, value: str):
        kind, got, col = self._cur()
        if got == value and kind in ("punct", "ident"):
            return self._advance()
        raise self._error(f"expected {value!r}")

    def parse(self) -> CtlFormula:
        f = self._implies()
        if self._cur()[0] != "eof":
            raise self._error("trailing input after formula")
        return f

    def _implies(self) -> CtlFormula:
        left = self._or()
        if self._cur()[1] == "->":
            self._advance()
            return CtlImplies(left, self._implies())
        return left

    def _or(self) -> CtlFormula:
        left = self._and()
        while self._cur()[1] in ("|", "||") and self._cur()[0] == "punct":
            self._advance()
            left = CtlOr(left, self._and())
        return left

    def _and(self) -> CtlFormula:
        left = self._unary()
        while self._cur()[1] in ("&", "&&") and self._cur()[0] == "punct":
            self._advance()
            left = CtlAnd(left, self._unary())
        return left

    def _unary(self) -> CtlFormula:
        kind, value, _ = self._cur()
        if kind == "punct" and value == "!":
            self._advance()
            return CtlNot(self._unary())
        if kind == "punct" and value == "(":
            self._advance()
            inner = self._implies()
            self._expect(")")
            return inner
        if kind == "ident" and value == "true":
            self._advance()
            return CtlTrue()
        if kind == "ident" and value in ("A", "E") and self.tokens[self.i + 1][1] == "[":
            self._advance()
            self._expect("[")
            f = self._path(universal=value == "A")
            self._expect("]")
            return f
        if kind == "ident" and value in _PREDICATE_HEADS:
            return Label(self._predicate())
        raise self._error("expected a formula")

    def _path(self, universal: bool) -> CtlFormula:
        kind, value, _ = self._cur()
        if kind == "ident" and value in ("G", "F", "X"):
            self._advance()
            sub = self._implies()
            ops = {"G": (AG, EG), "F": (AF, EF), "X": (AX, EX)}
            return ops[value][0 if universal else 1](sub)
        left = self._implies()
        kind, value, _ = self._cur()
        if kind == "ident" and value == "U":
            self._advance()
            right = self._implies()
            return AU(left, right) if universal else EU(left, right)
        if kind == "punct" and value == "=>":
            if not universal:
                raise self._error("'=>' responsiveness sugar is only valid under A[...]")
            self._advance()
            self._expect("F")
            right = self._implies()
            # A[p => F q] abbreviates: on every path, always, p leads to q
            return AG(CtlImplies(left, AF(right)))
        raise self._error("expected a path operator (G, F, X, U or '=> F')")

    def _predicate(self) -> Predicate:
        head = self._advance()[1]
        self._expect("(")
        if head == "believes":
            # balance nested parens; the belief formula has its own grammar
            depth, parts = 1, []
            while depth > 0:
                kind, value, _ = self._cur()
                if kind == "eof":
                    raise self._error("unterminated believes(...)")
                if value == "(":
                    depth += 1
                elif value == ")":
                    depth -= 1
                    if depth == 0:
                        self._advance()
                        break
                parts.append(self._advance()[1])
            return BeliefHolds(parse_formula_text(" ".join(parts), self.filename))
        kind, name, _ = self._cur()
        if kind != "ident":
            raise self._error("expected an identifier")
        self._advance()
        self._expect(")")
        if head == "completed":
            return IntentionCompleted(name)
        if head == "blocked":
            return IntentionBlocked(name)
        if head == "desires":
            return DesireContains(name)
        if head == "status":
            self._expect("=")
            kind, status, _ = self._cur()
            if kind != "ident" or status not in STATUSES:
                raise self._error(f"expected one of {', '.join(STATUSES)}")
            self._advance()
            return EventStatus(name, status)
        if head == "progress":
            self._expect(">=")
            kind, num, _ = self._cur()
            if kind != "num":
                raise self._error("expected a number")
            self._advance()
            return ProgressAtLeast(name, Fraction(num))
        raise self._error(f"unknown predicate {head!r}")


def parse_ctl(text: str, filename: str = "<property>") -> CtlFormula:
    return _CtlParser(text, filename).parse()


def parse_properties(text: str, filename: str = "<properties>") -> list[tuple[str, CtlFormula]]:
    """`name: formula` per line; blank lines and '#' comments ignored."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        # '#' never occurs inside a formula, so strip comments textually
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ParseError(filename, lineno, 1, "expected 'name: formula'")
        name, formula = line.split(":", 1)
        name = name.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
            raise ParseError(filename, lineno, 1, f"bad property name {name!r}")
        out.append((name, parse_ctl(formula.strip(), f"{filename}:{lineno}")))
    return out


# ── checking ──────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class CheckResult:
    holds: bool
    sat: frozenset[int]
    witness: tuple[int, ...] | None = None  # counterexample path; a repeated final
    #                                         state closes a cycle


def _label_states(ts: TransitionSystem, pred: Predicate) -> set[int]:
    try:
        k = ts.predicates.index(pred)
    except ValueError:
        raise UnknownLabel(f"predicate {format_predicate(pred)} was not part of this exploration")
    return {i for i in range(ts.state_count) if k in ts.labels[i]}


def _sat(ts: TransitionSystem, f: CtlFormula) -> set[int]:
    all_states = set(range(ts.state_count))
    succs = ts.successors()

    def ex(target: set[int]) -> set[int]:
        return {i for i in all_states if any(j in target for j in succs[i])}

    def eu(hold: set[int], target: set[int]) -> set[int]:
        acc = set(target)
        frontier = list(target)
        preds = ts.predecessors()
        while frontier:
            j = frontier.pop()
            for i in preds[j]:
                if i in hold and i not in acc:
                    acc.add(i)
                    frontier.append(i)
        return acc

    def eg(hold: set[int]) -> set[int]:
        acc = set(hold)
        changed = True
        while changed:
            changed = False
            for i in list(acc):
                if not any(j in acc for j in succs[i]):
                    acc.discard(i)
                    changed = True
        return acc

    match f:
        case CtlTrue():
            return all_states
        case Label(p):
            return _label_states(ts, p)
        case CtlNot(s):
            return all_states - _sat(ts, s)
        case CtlAnd(l, r):
            return _sat(ts, l) & _sat(ts, r)
        case CtlOr(l, r):
            return _sat(ts, l) | _sat(ts, r)
        case CtlImplies(l, r):
            return (all_states - _sat(ts, l)) | _sat(ts, r)
        case EX(s):
            return ex(_sat(ts, s))
        case AX(s):
            return all_states - ex(all_states - _sat(ts, s))
        case EF(s):
            return eu(all_states, _sat(ts, s))
        case AF(s):
            return all_states - eg(all_states - _sat(ts, s))
        case EG(s):
            return eg(_sat(ts, s))
        case AG(s):
            return all_states - eu(all_states, all_states - _sat(ts, s))
        case EU(l, r):
            return eu(_sat(ts, l), _sat(ts, r))
        case AU(l, r):
            # A[l U r] = not( E[not-r U (not-l and not-r)] or EG not-r )
            sl, sr = _sat(ts, l), _sat(ts, r)
            not_r = all_states - sr
            bad = eu(not_r, not_r - sl)
            return all_states - (bad | eg(not_r))
    raise TypeError(f"not a CTL formula: {f!r}")


def _shortest_path(ts: TransitionSystem, start: int, targets: set[int]) -> list[int]:
    from collections import deque

    prev: dict[int, int] = {start: -1}
    q = deque([start])
    succs = ts.successors()
    while q:
        i = q.popleft()
        if i in targets:
            path = [i]
            while prev[path[-1]] != -1:
                path.append(prev[path[-1]])
            return list(reversed(path))
        for j in succs[i]:
            if j not in prev:
                prev[j] = i
                q.append(j)
    return []


def _lasso_within(ts: TransitionSystem, start: int, region: set[int]) -> list[int]:
    """A path from start staying in region until a state repeats (region is EG-closed)."""
    succs = ts.successors()
    path = [start]
    seen = {start}
    cur = start
    while True:
        nxt = next(j for j in succs[cur] if j in region)
        path.append(nxt)
        if nxt in seen:
            return path
        seen.add(nxt)
        cur = nxt


def _witness(ts: TransitionSystem, f: CtlFormula, sat: set[int]) -> tuple[int, ...] | None:
    if ts.initial in sat:
        return None
    match f:
        case AG(sub):
            bad = set(range(ts.state_count)) - _sat(ts, sub)
            path = _shortest_path(ts, ts.initial, bad)
            violating = path[-1] if path else ts.initial
            # extend with the inner AF failure when the violation is a pending response
            match sub:
                case CtlImplies(_, AF(resp)):
                    region = _sat(ts, EG(CtlNot(resp)))
                    if violating in region:
                        return tuple(path[:-1] + _lasso_within(ts, violating, region))
            return tuple(path)
        case AF(sub):
            region = _sat(ts, EG(CtlNot(sub)))
            if ts.initial in region:
                return tuple(_lasso_within(ts, ts.initial, region))
            return None
    return None


def check(ts: TransitionSystem, formula: CtlFormula) -> CheckResult:
    """Does the formula hold at the initial state?"""
    sat = _sat(ts, formula)
    return CheckResult(
        holds=ts.initial in sat,
        sat=frozenset(sat),
        witness=_witness(ts, formula, sat),
    )
