"""Seeded random agent construction for property tests.

Agents come out small on purpose: the tests that consume them enumerate the
whole reachable configuration space, so bodies stay short and every event
reference points at a strictly later event (which keeps the plan graph
acyclic by construction).
"""

from __future__ import annotations

from random import Random

from canrt.lang import (
    TRUE,
    body_events,
    Act,
    And,
    Atom,
    CompiledAgent,
    Event,
    Goal,
    Nil,
    Not,
    Or,
    PlanDecl,
    ActionDecl,
    MotivationDecl,
    format_agent,
)


def gen_formula(rng: Random, atoms: list[str], depth: int = 2):
    if depth == 0 or rng.random() < 0.4:
        if rng.random() < 0.15:
            return TRUE
        a = Atom(rng.choice(atoms))
        return Not(a) if rng.random() < 0.4 else a
    left = gen_formula(rng, atoms, depth - 1)
    right = gen_formula(rng, atoms, depth - 1)
    return And(left, right) if rng.random() < 0.5 else Or(left, right)


def gen_body(rng: Random, actions: list[str], events: list[str], atoms: list[str], depth: int = 2):
    """Plan body whose event references are drawn only from `events`."""
    choices = ["act"]
    if events:
        choices.append("event")
        choices.append("goal")
    if depth > 0:
        choices += ["seq", "seq", "par"]
    kind = rng.choice(choices)
    if kind == "act":
        return Act(rng.choice(actions))
    if kind == "event":
        return Event(rng.choice(events))
    if kind == "goal":
        return Goal(gen_formula(rng, atoms, 1), Event(rng.choice(events)), gen_formula(rng, atoms, 1))
    left = gen_body(rng, actions, events, atoms, depth - 1)
    right = gen_body(rng, actions, events, atoms, depth - 1)
    if kind == "seq":
        from canrt.lang import Seq

        return Seq(left, right)
    from canrt.lang import Par

    return Par(left, right)


def gen_agent(
    rng: Random,
    max_events: int = 2,
    max_plans: int = 4,
    max_actions: int = 3,
    max_atoms: int = 4,
    with_motivations: bool = False,
) -> CompiledAgent:
    n_atoms = rng.randint(1, max_atoms)
    atoms = [f"b{i}" for i in range(n_atoms)]
    n_actions = rng.randint(1, max_actions)
    action_names = [f"act{i}" for i in range(n_actions)]
    n_events = rng.randint(1, max_events)
    event_names = [f"ev{i}" for i in range(n_events)]

    actions = []
    for name in action_names:
        pre = gen_formula(rng, atoms, 1)
        adds = frozenset(a for a in atoms if rng.random() < 0.35)
        dels = frozenset(a for a in atoms if a not in adds and rng.random() < 0.35)
        actions.append(ActionDecl(name, pre, adds, dels))

    drafts = []
    n_plans = rng.randint(1, max_plans)
    for _ in range(n_plans):
        i = rng.randrange(n_events)
        # acyclic: a plan for ev_i may only mention ev_j with j > i
        later = event_names[i + 1:]
        body = gen_body(rng, action_names, later, atoms)
        ctx = gen_formula(rng, atoms, 1) if rng.random() < 0.7 else TRUE
        drafts.append((event_names[i], ctx, body))
    # every referenced event needs a handling plan to be a declared name
    handled = {e for e, _, _ in drafts}
    referenced = set()
    for _, _, body in drafts:
        referenced |= body_events(body)
    for e in sorted(referenced - handled):
        drafts.append((e, TRUE, Act(rng.choice(action_names))))
    plans = [PlanDecl(e, ctx, body, f"P{k + 1}") for k, (e, ctx, body) in enumerate(drafts)]

    motivations = ()
    if with_motivations and rng.random() < 0.8:
        motivations = (
            MotivationDecl(gen_formula(rng, atoms, 1), rng.choice(event_names), "m0"),
        )

    beliefs = frozenset(a for a in atoms if rng.random() < 0.4)
    negations = frozenset(a for a in atoms if a not in beliefs and rng.random() < 0.2)
    return CompiledAgent(
        initial_beliefs=beliefs,
        negative_assertions=negations,
        external_events=(("ev0", "x0"),),
        plans=tuple(plans),
        actions=tuple(actions),
        motivations=motivations,
    )


def gen_source(rng: Random, **kw) -> str:
    return format_agent(gen_agent(rng, **kw))


# recursion-oracle inputs: raw plan libraries that may or may not be cyclic

def gen_library(rng: Random, max_events: int = 6, max_plans: int = 8) -> tuple[str, dict]:
    """Source text for a plan library plus its event reference graph."""
    n_events = rng.randint(1, max_events)
    events = [f"ev{i}" for i in range(n_events)]
    lines = ["action noop : true <- +{} -{}."]
    lines.extend(f"event ev{i} [x{i}]." for i in range(n_events))
    edges: dict[str, set[str]] = {}
    for k in range(rng.randint(1, max_plans)):
        trigger = rng.choice(events)
        refs = [e for e in events if rng.random() < 0.3]
        body = "; ".join([f"!{e}" for e in refs] + ["noop"])
        lines.append(f"plan {trigger} : true <- {body}.")
        edges.setdefault(trigger, set()).update(refs)
    return "\n".join(lines) + "\n", edges


def has_cycle(edges: dict) -> bool:
    color = {}

    def visit(n) -> bool:
        color[n] = 1
        for m in sorted(edges.get(n, ())):
            c = color.get(m, 0)
            if c == 1 or (c == 0 and visit(m)):
                return True
        color[n] = 2
        return False

    return any(color.get(n, 0) == 0 and visit(n) for n in sorted(edges))
