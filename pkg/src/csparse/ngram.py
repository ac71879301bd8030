"""Trigram language model with interpolated modified Kneser-Ney smoothing.

Counts follow the usual scheme: raw counts at order 3, left-extension
continuation counts below, except that n-grams starting with BOS keep
raw counts (nothing can precede BOS).  The interpolated estimates are
stored in backoff form (probability tables plus context backoff
weights), which scores identically and serializes directly to ARPA.

Discounts per order come from the count-of-counts formula
Y = n1/(n1+2 n2), D_k = k - (k+1) Y n_{k+1}/n_k; when the statistics
are degenerate (tiny corpora) an absolute discount of 0.75 stands in,
and every D_k is clamped into [0, k] so discounted mass stays
nonnegative.
"""

from __future__ import annotations

import math
from collections import Counter

from .base import BaseEstimator, check_fitted
from .errors import DataError

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
RESERVED = (BOS, EOS, UNK)

LN10 = math.log(10.0)
#: ARPA placeholder log10 probability for entries that exist only to
#: carry a backoff weight (<s> and <s> <s>).
ARPA_PLACEHOLDER = -99.0


def _count_tables(corpus: list[list[str]]):
    raw3: Counter = Counter()
    raw2: Counter = Counter()
    for sent in corpus:
        stream = [BOS, BOS] + list(sent) + [EOS]
        for i in range(len(stream) - 2):
            raw3[tuple(stream[i : i + 3])] += 1
        for i in range(len(stream) - 1):
            raw2[tuple(stream[i : i + 2])] += 1

    left2: dict[tuple, set] = {}
    for (x, v, w) in raw3:
        if v != BOS:
            left2.setdefault((v, w), set()).add(x)
    adj2 = {k: len(s) for k, s in left2.items()}
    for (v, w), c in raw2.items():
        if v == BOS and w != BOS:
            adj2[(v, w)] = c

    left1: dict[tuple, set] = {}
    for (v, w) in adj2:
        left1.setdefault((w,), set()).add(v)
    adj1 = {k: len(s) for k, s in left1.items()}
    return adj1, adj2, dict(raw3)


def _discounts(table: dict) -> dict[int, float]:
    n = Counter(min(c, 4) for c in table.values())
    n1, n2, n3, n4 = n[1], n[2], n[3], n[4]
    if n1 > 0 and n2 > 0:
        y = n1 / (n1 + 2.0 * n2)
        ds = {
            1: 1.0 - 2.0 * y * n2 / n1,
            2: 2.0 - 3.0 * y * n3 / n2,
            3: (3.0 - 4.0 * y * n4 / n3) if n3 > 0 else 0.75,
        }
    else:
        ds = {1: 0.75, 2: 0.75, 3: 0.75}
    # Strictly positive floor: backoff mass may never vanish entirely or
    # unseen continuations would score -inf.
    return {k: min(max(d, 1e-9), float(k)) for k, d in ds.items()}


def _group_by_context(table: dict) -> dict[tuple, dict[str, int]]:
    grouped: dict[tuple, dict[str, int]] = {}
    for ngram, count in table.items():
        grouped.setdefault(ngram[:-1], {})[ngram[-1]] = count
    return grouped


class TrigramLM(BaseEstimator):
    """Kneser-Ney trigram model over tokenized sentences.

    ``fit`` takes a list of token lists; BOS/EOS padding is internal.
    Scores are natural-log; OOV words map to UNK, which always has
    nonzero mass.
    """

    def fit(self, X, y=None):
        corpus = [list(sent) for sent in X]
        if not corpus:
            raise DataError("empty corpus")
        for sent in corpus:
            for tok in sent:
                if tok in RESERVED:
                    raise DataError(f"reserved token {tok!r} in corpus")

        adj1, adj2, adj3 = _count_tables(corpus)
        d1, d2, d3 = _discounts(adj1), _discounts(adj2), _discounts(adj3)

        words = sorted(w for (w,) in adj1)
        vpred = sorted(set(words) | {EOS, UNK})
        uniform = 1.0 / len(vpred)

        a1_total = sum(adj1.values())
        gamma1 = sum(d1[min(c, 3)] for c in adj1.values()) / a1_total
        p1 = {}
        for w in vpred:
            c = adj1.get((w,), 0)
            base = max(c - d1[min(c, 3)], 0.0) / a1_total if c else 0.0
            p1[w] = base + gamma1 * uniform

        p2: dict[tuple, float] = {}
        gamma2: dict[tuple, float] = {}
        for ctx, entries in _group_by_context(adj2).items():
            total = sum(entries.values())
            gamma2[ctx] = sum(d2[min(c, 3)] for c in entries.values()) / total
            for w, c in entries.items():
                base = max(c - d2[min(c, 3)], 0.0) / total
                p2[ctx + (w,)] = base + gamma2[ctx] * p1[w]

        def p2_of(w: str, v: str) -> float:
            full = p2.get((v, w))
            if full is not None:
                return full
            return gamma2.get((v,), 1.0) * p1[w]

        p3: dict[tuple, float] = {}
        gamma3: dict[tuple, float] = {}
        for ctx, entries in _group_by_context(adj3).items():
            total = sum(entries.values())
            gamma3[ctx] = sum(d3[min(c, 3)] for c in entries.values()) / total
            for w, c in entries.items():
                base = max(c - d3[min(c, 3)], 0.0) / total
                p3[ctx + (w,)] = base + gamma3[ctx] * p2_of(w, ctx[1])

        self.vocab_ = set(vpred)
        self.words_ = words
        self.logp_ = {
            1: {(w,): math.log(v) for w, v in p1.items()},
            2: {k: math.log(v) for k, v in p2.items()},
            3: {k: math.log(v) for k, v in p3.items()},
        }
        self.backoff_ = {
            ctx: math.log(g) for ctx, g in {**gamma2, **gamma3}.items() if g > 0.0
        }
        return self

    def _map(self, word: str) -> str:
        if word == BOS or word in self.vocab_:
            return word
        return UNK

    def cond_logp(self, u: str, v: str, w: str) -> float:
        """ln P(w | u v); OOV anywhere maps to UNK first."""
        check_fitted(self, "logp_")
        u, v, w = self._map(u), self._map(v), self._map(w)
        if w == BOS:
            raise DataError("BOS cannot be predicted")
        p = self.logp_[3].get((u, v, w))
        if p is not None:
            return p
        out = self.backoff_.get((u, v), 0.0)
        p = self.logp_[2].get((v, w))
        if p is not None:
            return out + p
        out += self.backoff_.get((v,), 0.0)
        return out + self.logp_[1][(w,)]

    def partial_score(self, words: list[str]) -> float:
        """Σ ln P(wᵢ | wᵢ₋₂ wᵢ₋₁) with BOS padding, no EOS term."""
        context = (BOS, BOS)
        total = 0.0
        for w in words:
            total += self.cond_logp(context[0], context[1], w)
            context = (context[1], self._map(w))
        return total

    def score(self, words: list[str]) -> float:
        """Full sentence log-probability including the EOS term."""
        words = list(words)
        if not words:
            raise DataError("cannot score an empty sequence")
        stream = [BOS, BOS] + words + [EOS]
        return sum(
            self.cond_logp(*stream[i : i + 3]) for i in range(len(stream) - 2)
        )

    def perplexity(self, X) -> float:
        sentences = [list(s) for s in X]
        if not sentences:
            raise DataError("empty corpus")
        total = sum(self.score(s) for s in sentences)
        tokens = sum(len(s) + 1 for s in sentences)
        return math.exp(-total / tokens)

    def to_arpa(self, path) -> None:
        check_fitted(self, "logp_")
        uni = dict(self.logp_[1])
        uni[(BOS,)] = None
        bi = dict(self.logp_[2])
        if (BOS, BOS) in self.backoff_:
            bi.setdefault((BOS, BOS), None)
        tri = self.logp_[3]

        def p10(val: float | None) -> str:
            return repr(ARPA_PLACEHOLDER if val is None else val / LN10)

        lines = ["\\data\\"]
        for order, table in ((1, uni), (2, bi), (3, tri)):
            lines.append(f"ngram {order}={len(table)}")
        lines.append("")
        for order, table in ((1, uni), (2, bi), (3, tri)):
            lines.append(f"\\{order}-grams:")
            for ngram in sorted(table):
                entry = f"{p10(table[ngram])}\t{' '.join(ngram)}"
                if order < 3 and ngram in self.backoff_:
                    entry += f"\t{self.backoff_[ngram] / LN10!r}"
                lines.append(entry)
            lines.append("")
        lines.append("\\end\\")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_arpa(cls, path) -> "TrigramLM":
        logp: dict[int, dict] = {1: {}, 2: {}, 3: {}}
        backoff: dict[tuple, float] = {}
        order = None
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line == "\\data\\" or line.startswith("ngram "):
                    continue
                if line == "\\end\\":
                    break
                if line.endswith("-grams:"):
                    order = int(line[1])
                    if order not in (1, 2, 3):
                        raise DataError(f"{path}: line {lineno}: bad order {order}")
                    continue
                if order is None:
                    raise DataError(f"{path}: line {lineno}: entry before any section")
                cols = line.split("\t")
                if len(cols) not in (2, 3):
                    raise DataError(f"{path}: line {lineno}: expected 2 or 3 columns")
                ngram = tuple(cols[1].split(" "))
                if len(ngram) != order:
                    raise DataError(
                        f"{path}: line {lineno}: {len(ngram)}-gram in {order}-gram section"
                    )
                logp[order][ngram] = float(cols[0]) * LN10
                if len(cols) == 3:
                    backoff[ngram] = float(cols[2]) * LN10
        if not logp[1]:
            raise DataError(f"{path}: no unigrams")
        lm = cls()
        lm.logp_ = logp
        lm.backoff_ = backoff
        lm.vocab_ = {w for (w,) in logp[1] if w != BOS}
        lm.words_ = sorted(lm.vocab_ - {EOS, UNK})
        return lm


def lm_score(lm: TrigramLM, words: list[str]) -> float:
    return lm.score(words)
