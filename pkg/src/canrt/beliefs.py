"""Belief bases: sets of ground atoms under the closed-world assumption."""

from __future__ import annotations

from .lang import And, Atom, Formula, Not, Or, Truth

BeliefBase = frozenset[str]

EMPTY: BeliefBase = frozenset()


def entails(base: BeliefBase, f: Formula) -> bool:
    """Closed-world entailment: an atom holds iff it is in the base."""
    match f:
        case Truth():
            return True
        case Atom(name):
            return name in base
        case Not(sub):
            return not entails(base, sub)
        case And(l, r):
            return entails(base, l) and entails(base, r)
        case Or(l, r):
            return entails(base, l) or entails(base, r)
    raise TypeError(f"not a formula: {f!r}")


def apply_effects(base: BeliefBase, adds: frozenset[str], dels: frozenset[str]) -> BeliefBase:
    """Delete-then-add update. adds and dels must be disjoint (validated at parse)."""
    return (base - dels) | adds
