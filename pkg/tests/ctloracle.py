"""Brute-force CTL reference semantics by bounded path enumeration.

Independent of the fixed-point checker on purpose. On a total system with n
states, any infinite path revisits a state within its first n steps, so every
operator is decided exactly by enumerating walks of length n (memoized on
(state, remaining depth); no fixed points anywhere). Universal operators are
enumerated directly over all successors rather than via complement identities,
which is what makes the duality comparisons in the tests meaningful.
"""

from __future__ import annotations

from functools import lru_cache
from random import Random

from canrt.ctl import (
    AF,
    AG,
    AU,
    AX,
    CtlAnd,
    CtlFormula,
    CtlImplies,
    CtlNot,
    CtlOr,
    CtlTrue,
    EF,
    EG,
    EU,
    EX,
    Label,
)
from canrt.explorer import DesireContains, TransitionSystem


def random_system(rng: Random, max_states: int = 8, n_props: int = 3) -> TransitionSystem:
    """A total transition system with arbitrary shape and labeling."""
    n = rng.randint(1, max_states)
    transitions = set()
    for i in range(n):
        for j in rng.sample(range(n), rng.randint(1, min(3, n))):
            transitions.add((i, j))
    # DesireContains is the cheapest purely-nominal predicate to reuse as an
    # atomic proposition; the checker only ever compares them by identity.
    predicates = tuple(DesireContains(f"p{k}") for k in range(n_props))
    labels = [
        frozenset(k for k in range(n_props) if rng.random() < 0.5) for _ in range(n)
    ]
    return TransitionSystem(
        states=[None] * n,
        canonical=[f"s{i}" for i in range(n)],
        transitions=transitions,
        initial=0,
        deadlocks=frozenset(),
        predicates=predicates,
        labels=labels,
    )


def random_formula(rng: Random, ts: TransitionSystem, depth: int = 3) -> CtlFormula:
    atoms = [Label(p) for p in ts.predicates] + [CtlTrue()]
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(atoms)
    op = rng.choice(["not", "and", "or", "implies", "EX", "AX", "EF", "AF", "EG", "AG", "EU", "AU"])
    sub = lambda: random_formula(rng, ts, depth - 1)
    if op == "not":
        return CtlNot(sub())
    if op == "and":
        return CtlAnd(sub(), sub())
    if op == "or":
        return CtlOr(sub(), sub())
    if op == "implies":
        return CtlImplies(sub(), sub())
    if op == "EX":
        return EX(sub())
    if op == "AX":
        return AX(sub())
    if op == "EF":
        return EF(sub())
    if op == "AF":
        return AF(sub())
    if op == "EG":
        return EG(sub())
    if op == "AG":
        return AG(sub())
    if op == "EU":
        return EU(sub(), sub())
    return AU(sub(), sub())


def oracle_sat(ts: TransitionSystem, f: CtlFormula) -> set[int]:
    """States satisfying f, by depth-bounded walk enumeration."""
    n = ts.state_count
    succs = ts.successors()

    def holds(state: int, g: CtlFormula) -> bool:
        if isinstance(g, CtlTrue):
            return True
        if isinstance(g, Label):
            return ts.predicates.index(g.predicate) in ts.labels[state]
        if isinstance(g, CtlNot):
            return not holds(state, g.sub)
        if isinstance(g, CtlAnd):
            return holds(state, g.left) and holds(state, g.right)
        if isinstance(g, CtlOr):
            return holds(state, g.left) or holds(state, g.right)
        if isinstance(g, CtlImplies):
            return (not holds(state, g.left)) or holds(state, g.right)
        if isinstance(g, EX):
            return any(holds(t, g.sub) for t in succs[state])
        if isinstance(g, AX):
            return all(holds(t, g.sub) for t in succs[state])

        # path operators: a walk of n steps is as good as an infinite path
        if isinstance(g, (EF, EU)):
            left = CtlTrue() if isinstance(g, EF) else g.left
            right = g.sub if isinstance(g, EF) else g.right

            @lru_cache(maxsize=None)
            def ereach(s: int, k: int) -> bool:
                if holds(s, right):
                    return True
                if k == 0 or not holds(s, left):
                    return False
                return any(ereach(t, k - 1) for t in succs[s])

            return ereach(state, n)
        if isinstance(g, (AF, AU)):
            left = CtlTrue() if isinstance(g, AF) else g.left
            right = g.sub if isinstance(g, AF) else g.right

            @lru_cache(maxsize=None)
            def areach(s: int, k: int) -> bool:
                if holds(s, right):
                    return True
                if k == 0 or not holds(s, left):
                    return False
                return all(areach(t, k - 1) for t in succs[s])

            return areach(state, n)
        if isinstance(g, EG):

            @lru_cache(maxsize=None)
            def estay(s: int, k: int) -> bool:
                if not holds(s, g.sub):
                    return False
                if k == 0:
                    return True
                return any(estay(t, k - 1) for t in succs[s])

            return estay(state, n)
        if isinstance(g, AG):

            @lru_cache(maxsize=None)
            def astay(s: int, k: int) -> bool:
                if not holds(s, g.sub):
                    return False
                if k == 0:
                    return True
                return all(astay(t, k - 1) for t in succs[s])

            return astay(state, n)
        raise TypeError(f"unknown formula {g!r}")

    return {s for s in range(n) if holds(s, f)}
