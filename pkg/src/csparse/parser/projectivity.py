"""Pseudo-projective transforms, head+path encoding.

Non-projective arcs are lifted one ancestor at a time (shortest span
first) until the tree is projective.  A lifted arc's label records the
original syntactic head's label ("deprel^headlabel"); every arc on the
chain from the final attachment point down to the original head is
marked with a trailing "~".  Deprojectivization searches marked arcs
breadth-first from the lifted arc's head and lowers it to the deepest
matching node, so a single lifted arc always returns home exactly.
"""

from __future__ import annotations

import warnings

from ..conllu import Sentence, Token
from ..errors import DataError

HEAD_SEP = "^"
PATH_MARK = "~"


def base_label(label: str) -> str:
    """Label with head encoding and path marker stripped."""
    return label.split(HEAD_SEP)[0].rstrip(PATH_MARK)


def _descendants(heads: list[int], node: int) -> set[int]:
    out = set()
    for d in range(1, len(heads)):
        walk = d
        while walk > 0:
            if walk == node:
                out.add(d)
                break
            walk = heads[walk]
    return out


def _nonprojective_arcs(heads: list[int]) -> list[tuple[int, int]]:
    """Arcs (h, d) with a token between them not descended from h."""
    bad = []
    for d in range(1, len(heads)):
        h = heads[d]
        if h <= 0:
            continue
        lo, hi = min(h, d), max(h, d)
        desc = None
        for k in range(lo + 1, hi):
            if desc is None:
                desc = _descendants(heads, h)
            if k not in desc:
                bad.append((h, d))
                break
    return bad


def is_projective(sentence_or_heads) -> bool:
    return not _nonprojective_arcs(_as_heads(sentence_or_heads))


def _as_heads(sentence_or_heads) -> list[int]:
    if isinstance(sentence_or_heads, Sentence):
        heads = [-1]
        for tok in sentence_or_heads:
            if tok.head is None:
                raise DataError(f"token {tok.index}: head unset")
            heads.append(tok.head)
        return heads
    return [-1] + list(sentence_or_heads)


def projectivize(sentence: Sentence) -> Sentence:
    """Lift non-projective arcs until the tree is projective.

    Returns a new sentence; the input is untouched.  Labels must not
    already contain the encoding characters.
    """
    heads = _as_heads(sentence)
    labels = [""] + [t.deprel or "dep" for t in sentence]
    for l in labels[1:]:
        if HEAD_SEP in l or PATH_MARK in l:
            raise DataError(f"label {l!r} collides with the head+path encoding")

    # original syntactic head of each lifted dependent, recorded once
    origin: dict[int, tuple[int, str]] = {}
    while True:
        bad = _nonprojective_arcs(heads)
        if not bad:
            break
        h, d = min(bad, key=lambda arc: (abs(arc[0] - arc[1]), arc[1]))
        if d not in origin:
            origin[d] = (h, labels[h])
        heads[d] = heads[h]

    marked: set[int] = set()
    for d, (orig_head, head_label) in origin.items():
        labels[d] = f"{labels[d]}{HEAD_SEP}{base_label(head_label)}"
        # chain from the original head up to (excluding) the final head
        chain = []
        walk = orig_head
        while walk != heads[d] and walk > 0:
            chain.append(walk)
            walk = heads[walk]
        if walk == heads[d]:
            marked.update(chain)

    tokens = []
    for tok in sentence:
        label = labels[tok.index]
        if tok.index in marked:
            label = label + PATH_MARK
        tokens.append(
            Token(
                index=tok.index,
                form=tok.form,
                norm=tok.norm,
                lang=tok.lang,
                upos=tok.upos,
                head=heads[tok.index],
                deprel=label,
            )
        )
    return Sentence(tokens=tokens, meta=dict(sentence.meta))


def deprojectivize(sentence: Sentence) -> Sentence:
    """Lower head-encoded arcs back along marked paths.

    Unresolvable encodings keep the lifted attachment (markers
    stripped) and emit a warning.
    """
    heads = _as_heads(sentence)
    labels = [""] + [t.deprel or "dep" for t in sentence]
    n = len(sentence)

    def children(node: int, only_marked: bool, exclude: int) -> list[int]:
        out = []
        for d in range(1, n + 1):
            if d != exclude and heads[d] == node:
                if not only_marked or labels[d].endswith(PATH_MARK):
                    out.append(d)
        return out

    def deepest_match(start: int, target: str, only_marked: bool, exclude: int) -> int | None:
        # breadth-first; remember the last level where the label matched,
        # never descending into the lifted dependent itself
        frontier = children(start, only_marked, exclude)
        best = None
        while frontier:
            matches = [d for d in frontier if base_label(labels[d]) == target]
            if matches:
                best = min(matches)
            frontier = [g for d in frontier for g in children(d, only_marked, exclude)]
        return best

    for d in range(1, n + 1):
        if HEAD_SEP not in labels[d]:
            continue
        plain, target = labels[d].rstrip(PATH_MARK).split(HEAD_SEP, 1)
        new_head = deepest_match(heads[d], target, only_marked=True, exclude=d)
        if new_head is None:
            new_head = deepest_match(heads[d], target, only_marked=False, exclude=d)
        if new_head is None:
            warnings.warn(
                f"token {d}: cannot lower arc with target label {target!r}; keeping head"
            )
        else:
            heads[d] = new_head
        labels[d] = plain

    tokens = []
    for tok in sentence:
        tokens.append(
            Token(
                index=tok.index,
                form=tok.form,
                norm=tok.norm,
                lang=tok.lang,
                upos=tok.upos,
                head=heads[tok.index],
                deprel=base_label(labels[tok.index]),
            )
        )
    return Sentence(tokens=tokens, meta=dict(sentence.meta))
