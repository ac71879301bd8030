"""Transition-based dependency parsing."""

from .model import StackPropParser, parse, stackprop_train, tag_only
from .oracle import dynamic_oracle_costs, transition_cost, zero_cost_transitions
from .projectivity import base_label, deprojectivize, is_projective, projectivize
from .system import (
    LEFT,
    REDUCE,
    RIGHT,
    SHIFT,
    ParserConfig,
    Transition,
    apply_transition,
    arcs_to_heads,
    gold_arrays,
    is_legal,
    legal_transitions,
    oracle_sequence,
    run_transitions,
    static_oracle,
)

__all__ = [
    "SHIFT",
    "LEFT",
    "RIGHT",
    "REDUCE",
    "Transition",
    "ParserConfig",
    "legal_transitions",
    "is_legal",
    "apply_transition",
    "gold_arrays",
    "static_oracle",
    "oracle_sequence",
    "run_transitions",
    "arcs_to_heads",
    "transition_cost",
    "dynamic_oracle_costs",
    "zero_cost_transitions",
    "is_projective",
    "projectivize",
    "deprojectivize",
    "base_label",
    "StackPropParser",
    "stackprop_train",
    "parse",
    "tag_only",
]
