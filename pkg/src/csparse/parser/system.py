"""Arc-eager transition system.

Configurations are immutable snapshots (apply returns a new config), so
oracle search can branch freely.  Token indices are 1-based with 0 for
the artificial ROOT at the stack bottom.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..conllu import Sentence

SHIFT = "shift"
LEFT = "left_arc"
RIGHT = "right_arc"
REDUCE = "reduce"
OPS = (SHIFT, LEFT, RIGHT, REDUCE)
ARC_OPS = (LEFT, RIGHT)


@dataclass(frozen=True)
class Transition:
    op: str
    label: str | None = None

    def __post_init__(self):
        if self.op not in OPS:
            raise ValueError(f"unknown transition op {self.op!r}")
        if self.label is not None and self.op not in ARC_OPS:
            raise ValueError(f"{self.op} takes no label")

    def __str__(self) -> str:
        names = {SHIFT: "Shift", LEFT: "LeftArc", RIGHT: "RightArc", REDUCE: "Reduce"}
        name = names[self.op]
        return f"{name}({self.label})" if self.label is not None else name


@dataclass(frozen=True)
class ParserConfig:
    """Arc-eager configuration (S, B, A) plus a dependent→(head, label) map."""

    stack: tuple[int, ...]
    buffer: tuple[int, ...]
    arcs: frozenset[tuple[int, int, str]] = field(default_factory=frozenset)

    @classmethod
    def initial(cls, n: int) -> "ParserConfig":
        return cls(stack=(0,), buffer=tuple(range(1, n + 1)))

    def is_terminal(self) -> bool:
        return not self.buffer and self.stack == (0,)

    def head_of(self, dep: int) -> int | None:
        for h, d, _ in self.arcs:
            if d == dep:
                return h
        return None

    def summary(self) -> str:
        return f"S={list(self.stack)} B={list(self.buffer)} |A|={len(self.arcs)}"


def legal_transitions(config: ParserConfig) -> set[str]:
    """The set of legal transition OPS (labels are orthogonal to legality).

    With an empty buffer only Reduce remains, popping the leftover stack
    down to ROOT.
    """
    legal: set[str] = set()
    top = config.stack[-1]
    top_headed = top != 0 and config.head_of(top) is not None
    if config.buffer:
        legal.add(SHIFT)
        legal.add(RIGHT)
        if top != 0 and not top_headed:
            legal.add(LEFT)
    if top != 0 and top_headed:
        legal.add(REDUCE)
    return legal


def is_legal(config: ParserConfig, t: Transition) -> bool:
    return t.op in legal_transitions(config)


def apply_transition(config: ParserConfig, t: Transition) -> ParserConfig:
    if not is_legal(config, t):
        raise ValueError(f"illegal transition {t} in config {config.summary()}")
    stack, buffer, arcs = config.stack, config.buffer, config.arcs
    if t.op == SHIFT:
        return ParserConfig(stack + (buffer[0],), buffer[1:], arcs)
    if t.op == LEFT:
        arc = (buffer[0], stack[-1], t.label or "dep")
        return ParserConfig(stack[:-1], buffer, arcs | {arc})
    if t.op == RIGHT:
        arc = (stack[-1], buffer[0], t.label or "dep")
        return ParserConfig(stack + (buffer[0],), buffer[1:], arcs | {arc})
    return ParserConfig(stack[:-1], buffer, arcs)


def gold_arrays(sentence: Sentence) -> tuple[list[int], list[str]]:
    """Gold heads/labels as 0-padded arrays indexed by token id."""
    heads = [-1] * (len(sentence) + 1)
    labels = [""] * (len(sentence) + 1)
    for tok in sentence:
        heads[tok.index] = tok.head if tok.head is not None else -1
        labels[tok.index] = tok.deprel or "dep"
    return heads, labels


def static_oracle(config: ParserConfig, heads: list[int], labels: list[str]) -> Transition:
    """Gold transition for a config on the canonical derivation of a
    projective gold tree."""
    if config.is_terminal():
        raise ValueError("terminal config has no oracle transition")
    top = config.stack[-1]
    if not config.buffer:
        return Transition(REDUCE)
    front = config.buffer[0]
    if top != 0 and heads[top] == front and config.head_of(top) is None:
        return Transition(LEFT, labels[top])
    if heads[front] == top:
        return Transition(RIGHT, labels[front])
    if (
        top != 0
        and config.head_of(top) is not None
        and all(heads[k] != top for k in config.buffer)
        and heads[top] not in config.buffer
    ):
        return Transition(REDUCE)
    return Transition(SHIFT)


def oracle_sequence(sentence: Sentence) -> list[Transition]:
    """Static-oracle transition sequence deriving the sentence's tree."""
    heads, labels = gold_arrays(sentence)
    config = ParserConfig.initial(len(sentence))
    seq = []
    while not config.is_terminal():
        t = static_oracle(config, heads, labels)
        config = apply_transition(config, t)
        seq.append(t)
        if len(seq) > 2 * len(sentence) + 1:
            raise ValueError("oracle sequence exceeded 2n transitions (not projective?)")
    return seq


def run_transitions(n: int, transitions: list[Transition]) -> ParserConfig:
    config = ParserConfig.initial(n)
    for t in transitions:
        config = apply_transition(config, t)
    return config


def arcs_to_heads(config: ParserConfig, n: int) -> tuple[list[int], list[str]]:
    """Heads/labels recovered from a (possibly partial) final config."""
    heads = [-1] * (n + 1)
    labels = [""] * (n + 1)
    for h, d, l in config.arcs:
        heads[d] = h
        labels[d] = l
    return heads, labels
