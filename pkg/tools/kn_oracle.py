"""Exact-arithmetic oracle for the trigram Kneser-Ney model.

Evaluates the interpolated formulas directly with Fractions (no backoff
tables, no logs) and prints conditionals for the frozen regression
values in tests/test_ngram.py.  Run: python3 tools/kn_oracle.py
"""

from collections import Counter
from fractions import Fraction

BOS, EOS, UNK = "<s>", "</s>", "<unk>"


def count_tables(corpus):
    raw3, raw2 = Counter(), Counter()
    for sent in corpus:
        stream = [BOS, BOS] + list(sent) + [EOS]
        for i in range(len(stream) - 2):
            raw3[tuple(stream[i : i + 3])] += 1
        for i in range(len(stream) - 1):
            raw2[tuple(stream[i : i + 2])] += 1

    adj3 = dict(raw3)
    left2 = {}
    for (x, v, w) in raw3:
        if v != BOS:
            left2.setdefault((v, w), set()).add(x)
    adj2 = {k: len(s) for k, s in left2.items()}
    for (v, w), c in raw2.items():
        if v == BOS and w != BOS:
            adj2[(v, w)] = c
    left1 = {}
    for (v, w) in adj2:
        left1.setdefault((w,), set()).add(v)
    adj1 = {k: len(s) for k, s in left1.items()}
    return adj1, adj2, adj3


def discounts(table):
    n = Counter(min(c, 4) for c in table.values() if c >= 1)
    n1, n2, n3, n4 = n[1], n[2], n[3], n[4]
    ds = {}
    if n1 > 0 and n2 > 0:
        y = Fraction(n1, n1 + 2 * n2)
        ds[1] = 1 - 2 * y * Fraction(n2, n1)
        ds[2] = 2 - 3 * y * Fraction(n3, n2)
        ds[3] = (3 - 4 * y * Fraction(n4, n3)) if n3 > 0 else Fraction(3, 4)
    else:
        ds = {1: Fraction(3, 4), 2: Fraction(3, 4), 3: Fraction(3, 4)}
    return {k: min(max(d, Fraction(0)), Fraction(k)) for k, d in ds.items()}


class Oracle:
    def __init__(self, corpus):
        self.adj1, self.adj2, self.adj3 = count_tables(corpus)
        self.d1 = discounts(self.adj1)
        self.d2 = discounts(self.adj2)
        self.d3 = discounts(self.adj3)
        words = {w for (w,) in self.adj1}
        self.vpred = sorted(words | {EOS, UNK})
        self.a1_total = sum(self.adj1.values())

    def p1(self, w):
        c = self.adj1.get((w,), 0)
        disc_mass = sum(self.d1[min(c2, 3)] for c2 in self.adj1.values())
        gamma = disc_mass / self.a1_total
        base = max(c - self.d1[min(c, 3)], 0) / self.a1_total if c else Fraction(0)
        return base + gamma * Fraction(1, len(self.vpred))

    def p2(self, w, v):
        entries = {k[1]: c for k, c in self.adj2.items() if k[0] == v}
        total = sum(entries.values())
        if total == 0:
            return self.p1(w)
        gamma = sum(self.d2[min(c, 3)] for c in entries.values()) / total
        c = entries.get(w, 0)
        base = max(c - self.d2[min(c, 3)], 0) / total if c else Fraction(0)
        return base + gamma * self.p1(w)

    def p3(self, w, u, v):
        entries = {k[2]: c for k, c in self.adj3.items() if k[:2] == (u, v)}
        total = sum(entries.values())
        if total == 0:
            return self.p2(w, v)
        gamma = sum(self.d3[min(c, 3)] for c in entries.values()) / total
        c = entries.get(w, 0)
        base = max(c - self.d3[min(c, 3)], 0) / total if c else Fraction(0)
        return base + gamma * self.p2(w, v)


def main():
    import math

    corpus = [["a", "b"], ["a", "b"], ["b", "a"]]
    oracle = Oracle(corpus)

    print("predicted vocabulary:", oracle.vpred)
    for hist in [(BOS, BOS), (BOS, "a"), ("a", "b"), ("b", "a"), (UNK, UNK), ("a", UNK), (UNK, "a")]:
        s = sum(oracle.p3(w, *hist) for w in oracle.vpred)
        print(f"sum over vocab given {hist}: {s} (exact 1: {s == 1})")
        assert s == 1

    cases = [
        ("a", BOS, BOS),
        ("b", BOS, "a"),
        (EOS, "a", "b"),
        (UNK, "a", "b"),
        ("a", "b", "a"),
        ("b", UNK, "a"),
    ]
    total = Fraction(0)
    for w, u, v in cases:
        p = oracle.p3(w, u, v)
        print(f"P({w!r} | {u!r} {v!r}) = {p} = {float(p)!r}  ln = {math.log(p)!r}")
    score = (
        oracle.p3("a", BOS, BOS)
        * oracle.p3("b", BOS, "a")
        * oracle.p3(EOS, "a", "b")
    )
    print(f"score(['a','b']) = ln {score} = {math.log(score)!r}")


if __name__ == "__main__":
    main()
