"""Arc-eager dynamic oracle via arc-reachability counts.

The cost of a transition is the drop it causes in the total achievable
labeled score: achieved(c) + reachable(c), where achieved counts gold
arcs already built with the right label and reachable counts gold arcs
still obtainable from the configuration.  For arc-eager, a pending gold
arc (h, d) is reachable iff

    d in B and h in S+B        (d can be attached when it surfaces), or
    d in S, d unheaded, h in B (LeftArc when h reaches the front).

Label mistakes cost exactly 1: the arc leaves the reachable set but
enters achieved only when the label matches.
"""

from __future__ import annotations

from ..conllu import Sentence
from .system import (
    LEFT,
    REDUCE,
    RIGHT,
    SHIFT,
    ParserConfig,
    Transition,
    apply_transition,
    gold_arrays,
    legal_transitions,
)


def _achievable(config: ParserConfig, heads: list[int], labels: list[str]) -> int:
    achieved = 0
    headed = set()
    for h, d, l in config.arcs:
        headed.add(d)
        if heads[d] == h and labels[d] == l:
            achieved += 1
    in_stack = set(config.stack)
    in_buffer = set(config.buffer)
    reachable = 0
    for d in range(1, len(heads)):
        if d in headed:
            continue
        h = heads[d]
        if d in in_buffer and (h in in_stack or h in in_buffer):
            reachable += 1
        elif d in in_stack and h in in_buffer:
            reachable += 1
    return achieved + reachable


def transition_cost(
    config: ParserConfig, t: Transition, heads: list[int], labels: list[str]
) -> int:
    """Cost of taking ``t``: loss in achievable labeled score."""
    before = _achievable(config, heads, labels)
    after = _achievable(apply_transition(config, t), heads, labels)
    return before - after


def dynamic_oracle_costs(
    config: ParserConfig, gold: Sentence
) -> dict[Transition, int]:
    """Cost for each legal transition family.

    Arc transitions are returned with the gold-optimal label (the gold
    label when the created arc is gold, else any label: label choice
    only matters on gold arcs).
    """
    heads, labels = gold_arrays(gold)
    costs: dict[Transition, int] = {}
    for op in legal_transitions(config):
        if op == LEFT:
            label = labels[config.stack[-1]]
            t = Transition(op, label)
        elif op == RIGHT:
            label = labels[config.buffer[0]]
            t = Transition(op, label)
        else:
            t = Transition(op)
        costs[t] = transition_cost(config, t, heads, labels)
    return costs


def zero_cost_transitions(config: ParserConfig, gold: Sentence) -> set[Transition]:
    return {t for t, c in dynamic_oracle_costs(config, gold).items() if c == 0}
