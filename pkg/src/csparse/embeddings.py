"""Pretrained word vectors, bilingual lexicon, cross-lingual projection.

Vectors arrive in word2vec text format.  The two monolingual spaces are
aligned with an orthogonal Procrustes projection learned from lexicon
anchor pairs; being orthogonal, the map preserves norms, so downstream
models can consume projected and native vectors interchangeably.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DataError


class EmbeddingSpace:
    """Word vectors plus one reserved UNK row (the mean of all vectors).

    The UNK row is a starting point: models copy the table and train
    their copy, steering UNK via random word-dropout.
    """

    def __init__(self, words: list[str], matrix: np.ndarray):
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise DataError(
                f"matrix shape {matrix.shape} does not match {len(words)} words"
            )
        if matrix.shape[1] < 1:
            raise DataError("embedding dim must be positive")
        if not np.isfinite(matrix).all():
            raise DataError("non-finite embedding values")
        self.words = list(words)
        self.dim = matrix.shape[1]
        unk = matrix.mean(axis=0) if len(words) else np.zeros(matrix.shape[1])
        self.matrix = np.vstack([matrix, unk[None, :]]).astype(np.float64)
        self.vocab = {w: i for i, w in enumerate(self.words)}
        self.unk_index = len(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def index(self, word: str) -> int | None:
        """Row index by exact then lowercase match; None when OOV."""
        idx = self.vocab.get(word)
        if idx is None:
            idx = self.vocab.get(word.lower())
        return idx

    def lookup_index(self, word: str) -> int:
        idx = self.index(word)
        return self.unk_index if idx is None else idx


def lookup(space: EmbeddingSpace, word: str, projection: np.ndarray | None = None) -> np.ndarray:
    """Vector for ``word``: exact match, else lowercase, else UNK row."""
    vec = space.matrix[space.lookup_index(word)]
    if projection is not None:
        vec = vec @ projection
    return vec


def load_embeddings(path) -> EmbeddingSpace:
    """Read word2vec-style text vectors ("word v1 ... vd" per line).

    An optional "count dim" header line is skipped.  Duplicate words keep
    the first occurrence (with a warning); ragged rows are an error.
    """
    words: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                    continue
                except ValueError:
                    pass
            word, values = parts[0], parts[1:]
            if not values:
                raise DataError(f"{path}: line {lineno}: no vector values")
            if dim is None:
                dim = len(values)
            elif len(values) != dim:
                raise DataError(
                    f"{path}: line {lineno}: expected {dim} values, got {len(values)}"
                )
            if word in seen:
                warnings.warn(f"{path}: line {lineno}: duplicate word {word!r}, keeping first")
                continue
            seen.add(word)
            try:
                rows.append(np.array([float(v) for v in values]))
            except ValueError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
            words.append(word)
    if not words:
        raise DataError(f"{path}: no vectors found")
    return EmbeddingSpace(words, np.stack(rows))


def save_embeddings(path, space: EmbeddingSpace) -> None:
    """Write vectors back out (with header; UNK row is not persisted)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(space.words)} {space.dim}\n")
        for i, word in enumerate(space.words):
            values = " ".join(repr(float(v)) for v in space.matrix[i])
            fh.write(f"{word} {values}\n")


class BilingualLexicon:
    """Translation pairs with case-insensitive source lookup.

    Both directions are indexed so either language can play the source
    role; insertion order of translations is preserved.
    """

    def __init__(self):
        self._fwd: dict[str, list[str]] = {}
        self._rev: dict[str, list[str]] = {}

    def add(self, src: str, tgt: str) -> None:
        if not src or not tgt:
            raise DataError("empty word in lexicon pair")
        fwd = self._fwd.setdefault(src.lower(), [])
        if tgt not in fwd:
            fwd.append(tgt)
        rev = self._rev.setdefault(tgt.lower(), [])
        if src not in rev:
            rev.append(src)

    def __len__(self) -> int:
        return sum(len(v) for v in self._fwd.values())

    def translations(self, word: str) -> list[str]:
        return list(self._fwd.get(word.lower(), []))

    def reverse_translations(self, word: str) -> list[str]:
        return list(self._rev.get(word.lower(), []))

    def pairs(self):
        for src, tgts in self._fwd.items():
            for tgt in tgts:
                yield src, tgt


def load_lexicon(path) -> BilingualLexicon:
    """Read a 2-column TSV (source<TAB>target), one pair per line."""
    lex = BilingualLexicon()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataError(
                    f"{path}: line {lineno}: expected 2 tab-separated columns, got {len(cols)}"
                )
            try:
                lex.add(cols[0], cols[1])
            except DataError as exc:
                raise DataError(f"{path}: line {lineno}: {exc}") from None
    if len(lex) == 0:
        raise DataError(f"{path}: empty lexicon")
    return lex


def _normalize_center(rows: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    unit = rows / norms
    return unit - unit.mean(axis=0, keepdims=True)


def learn_projection(
    src: EmbeddingSpace, tgt: EmbeddingSpace, lex: BilingualLexicon
) -> np.ndarray:
    """Orthogonal map W aligning src rows to their translations in tgt.

    Anchor pairs are lexicon entries found in both vocabularies
    (one-to-many entries expand to all pairs).  Rows are length-normalized
    then mean-centered; W = U Vt from the SVD of the cross-covariance,
    the closed-form Procrustes optimum.  Apply as ``vec @ W``.
    """
    if src.dim != tgt.dim:
        raise DataError(f"dim mismatch: src {src.dim} vs tgt {tgt.dim}")
    src_rows = []
    tgt_rows = []
    for s_word, t_word in lex.pairs():
        si = src.index(s_word)
        ti = tgt.index(t_word)
        if si is not None and ti is not None:
            src_rows.append(src.matrix[si])
            tgt_rows.append(tgt.matrix[ti])
    if len(src_rows) < src.dim:
        raise DataError(
            f"too few anchor pairs: {len(src_rows)} found, need at least {src.dim}"
        )
    X = _normalize_center(np.stack(src_rows))
    Z = _normalize_center(np.stack(tgt_rows))
    u, _, vt = np.linalg.svd(X.T @ Z)
    return u @ vt
