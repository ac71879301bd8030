"""Shared test utilities: data generators and the finite-difference oracle.

The tree generators and the gradient checker are deliberately
independent of the package internals they test: projectivity is judged
here by the arc-crossing criterion, gradients by central differences.
"""

from __future__ import annotations

import numpy as np

from csparse.conllu import LangTag, Sentence, Token
from csparse.nn import backward

UPOS_TAGS = ["NOUN", "VERB", "ADJ", "ADV", "PRON", "ADP", "AUX", "PART", "PUNCT"]
DEPRELS = ["nsubj", "obj", "obl", "amod", "advmod", "case", "aux", "mark", "punct"]


def random_tree(n: int, rng: np.random.Generator) -> list[int]:
    """Random single-rooted tree as a head vector (1-based tokens, 0 = ROOT)."""
    order = list(rng.permutation(n) + 1)
    heads = [0] * (n + 1)
    heads[order[0]] = 0
    for pos, node in enumerate(order[1:], start=1):
        heads[node] = int(order[int(rng.integers(0, pos))])
    return heads[1:]


def random_projective_tree(n: int, rng: np.random.Generator) -> list[int]:
    """Random projective tree built by recursive span splitting."""
    heads = [0] * (n + 1)

    def build(lo: int, hi: int, head: int):
        if lo > hi:
            return
        root = int(rng.integers(lo, hi + 1))
        heads[root] = head
        pos = lo
        while pos < root:
            end = int(rng.integers(pos, root))
            build(pos, end, root)
            pos = end + 1
        pos = root + 1
        while pos <= hi:
            end = int(rng.integers(pos, hi + 1))
            build(pos, end, root)
            pos = end + 1

    build(1, n, 0)
    return heads[1:]


def arcs_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    a_lo, a_hi = min(a), max(a)
    b_lo, b_hi = min(b), max(b)
    if a_lo == b_lo or a_lo == b_hi or a_hi == b_lo or a_hi == b_hi:
        return False
    return a_lo < b_lo < a_hi < b_hi or b_lo < a_lo < b_hi < a_hi


def is_projective_by_crossing(heads: list[int]) -> bool:
    """Independent projectivity oracle: no two arcs cross (ROOT arc included)."""
    arcs = [(h, d) for d, h in enumerate(heads, start=1)]
    for i in range(len(arcs)):
        for j in range(i + 1, len(arcs)):
            if arcs_cross(arcs[i], arcs[j]):
                return False
    return True


def all_trees(n: int):
    """Every single-rooted tree over n tokens, as head vectors."""

    def rec(prefix: list[int]):
        d = len(prefix) + 1
        if d > n:
            heads = list(prefix)
            if heads.count(0) == 1 and _acyclic(heads):
                yield heads
            return
        for h in range(n + 1):
            if h != d:
                yield from rec(prefix + [h])

    yield from rec([])


def _acyclic(heads: list[int]) -> bool:
    for start in range(1, len(heads) + 1):
        node, seen = start, set()
        while node != 0:
            if node in seen:
                return False
            seen.add(node)
            node = heads[node - 1]
    return True


def all_projective_trees(n: int):
    for heads in all_trees(n):
        if is_projective_by_crossing(heads):
            yield heads


def sentence_from_heads(
    heads: list[int],
    rng: np.random.Generator | None = None,
    deprels: list[str] | None = None,
) -> Sentence:
    n = len(heads)
    if deprels is None:
        if rng is None:
            deprels = ["dep"] * n
        else:
            deprels = [DEPRELS[int(rng.integers(0, len(DEPRELS)))] for _ in range(n)]
    tokens = [
        Token(index=i + 1, form=f"w{i + 1}", head=heads[i], deprel=deprels[i])
        for i in range(n)
    ]
    return Sentence(tokens=tokens)


def random_sentence(rng: np.random.Generator, max_len: int = 8) -> Sentence:
    """Random fully-populated sentence for serialization round-trips."""
    n = int(rng.integers(1, max_len + 1))
    heads = random_tree(n, rng)
    letters = "abcdefghijklmnopqrstuvwxyz"
    tags = list(LangTag)
    tokens = []
    for i in range(n):
        form = "".join(letters[int(rng.integers(0, 26))] for _ in range(int(rng.integers(1, 7))))
        norm = None
        if rng.random() < 0.4:
            norm = "".join(letters[int(rng.integers(0, 26))] for _ in range(3))
        tokens.append(
            Token(
                index=i + 1,
                form=form,
                norm=norm,
                lang=tags[int(rng.integers(0, len(tags)))],
                upos=UPOS_TAGS[int(rng.integers(0, len(UPOS_TAGS)))],
                head=heads[i],
                deprel=DEPRELS[int(rng.integers(0, len(DEPRELS)))],
            )
        )
    meta = {}
    if rng.random() < 0.5:
        meta["sent_id"] = str(int(rng.integers(0, 10_000)))
    return Sentence(tokens=tokens, meta=meta)


def finite_difference_check(loss_fn, params, eps: float = 1e-6, tol: float = 1e-4):
    """Compare analytic gradients against central finite differences.

    ``loss_fn`` must rebuild its graph on every call (parameters are
    perturbed in place between calls).  Relative error uses
    |a - n| / max(|a|, |n|, 1e-4) so near-zero gradients are judged on
    absolute error.
    """
    for p in params:
        p.zero_grad()
    loss = loss_fn()
    backward(loss)
    analytic = [p.grad.copy() for p in params]
    worst = 0.0
    for p, grad in zip(params, analytic):
        flat = p.value.ravel()
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + eps
            up = float(loss_fn().value)
            flat[k] = orig - eps
            down = float(loss_fn().value)
            flat[k] = orig
            numeric = (up - down) / (2 * eps)
            a = grad.ravel()[k]
            rel = abs(a - numeric) / max(abs(a), abs(numeric), 1e-4)
            worst = max(worst, rel)
            assert rel < tol, (
                f"gradient mismatch at entry {k}: analytic {a}, numeric {numeric}, "
                f"rel err {rel}"
            )
    return worst
