"""Token-level language identification.

Each token is represented by its English and (back-transliterated)
Hindi word vectors, a character Bi-LSTM summary, a dictionary flag and
a word-length flag; a sentence-level Bi-LSTM over these vectors feeds
an MLP softmax over the five tags.  Tokens with no alphabetic
character are tagged ``univ`` by rule before the network is consulted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import BaseEstimator, check_fitted, check_sentences, new_rng
from .conllu import TAG_ORDER, LangTag, Sentence, parse_lang_tag
from .embeddings import EmbeddingSpace, lookup
from .errors import DataError, ModelError
from .nn import (
    BiLstm,
    Embedding,
    Layer,
    Mlp,
    Parameter,
    Sgd,
    Tensor,
    add_n,
    backward,
    concat,
    dropout_mask,
    load_model,
    log_softmax_values,
    mask_mul,
    save_model,
    scale,
    softmax_xent,
)

CHAR_UNK = "<unk>"

# token-vector layout, in concatenation order
FEATURE_ORDER = ("en_vec", "hi_vec", "char_repr", "dict_flag", "length_bin")


def length_bin(word: str) -> int:
    """0: len 0-3, 1: len 4-6, 2: len 7-10, 3: longer."""
    n = len(word)
    if n <= 3:
        return 0
    if n <= 6:
        return 1
    if n <= 10:
        return 2
    return 3


def is_rule_universal(form: str) -> bool:
    return not any(c.isalpha() for c in form)


@dataclass
class LangIdResources:
    """External lookups the feature extractor draws on.

    Any field may be None; missing resources degrade to UNK or zero
    features rather than failing.
    """

    en_space: EmbeddingSpace | None = None
    hi_space: EmbeddingSpace | None = None
    dictionary: frozenset = frozenset()
    transliterator: object = None
    projection: np.ndarray | None = None


@dataclass
class LangIdFeatures:
    en_vec: np.ndarray
    hi_vec: np.ndarray
    chars: list[str]
    dict_flag: int
    length_bin: int


def featurize(
    form: str, resources: LangIdResources, use_projection: bool = False, cache: dict | None = None
) -> LangIdFeatures:
    """Raw per-token features; the model adds the trainable parts."""
    lowered = form.lower()
    if resources.en_space is not None:
        en_vec = lookup(resources.en_space, form)
    else:
        en_vec = np.zeros(0)
    hi_query = form
    if resources.transliterator is not None:
        if cache is not None and form in cache:
            hi_query = cache[form]
        else:
            hi_query = resources.transliterator.greedy_decode(form)
            if cache is not None:
                cache[form] = hi_query
    if resources.hi_space is not None:
        projection = resources.projection if use_projection else None
        hi_vec = lookup(resources.hi_space, hi_query, projection)
    else:
        hi_vec = np.zeros(0)
    return LangIdFeatures(
        en_vec=en_vec,
        hi_vec=hi_vec,
        chars=list(form),
        dict_flag=int(lowered in resources.dictionary),
        length_bin=length_bin(form),
    )


class _LangIdNet(Layer):
    def __init__(self, n_chars, char_dim, char_hidden, word_dim, flag_dim, sent_hidden, mlp_hidden, rng):
        self.char_emb = Embedding(n_chars, char_dim, rng)
        self.char_lstm = BiLstm(char_dim, char_hidden, rng)
        self.dict_emb = Embedding(2, flag_dim, rng)
        self.len_emb = Embedding(4, flag_dim, rng)
        self.sent_lstm = BiLstm(word_dim, sent_hidden, rng)
        self.mlp = Mlp([2 * sent_hidden, mlp_hidden, len(TAG_ORDER)], rng)

    def char_repr(self, char_ids: list[int]) -> Tensor:
        xs = [self.char_emb(i) for i in char_ids]
        fwd = self.char_lstm.fwd.run(xs)[-1]
        bwd = self.char_lstm.bwd.run(xs[::-1])[-1]
        return concat([fwd, bwd])


class LanguageIdentifier(BaseEstimator):
    """Five-way token language tagger.

    fit(X) expects sentences whose tokens carry gold ``lang`` tags;
    external lookups arrive through a :class:`LangIdResources` at
    construction of the fit call and are not serialized with the model.
    """

    def __init__(
        self,
        char_dim: int = 32,
        char_hidden: int = 32,
        flag_dim: int = 8,
        sent_hidden: int = 64,
        mlp_hidden: int = 64,
        dropout: float = 0.5,
        epochs: int = 100,
        lr: float = 0.1,
        momentum: float = 0.9,
        clip_norm: float = 5.0,
        patience: int = 5,
        use_projection: bool = False,
        seed: int = 0,
    ):
        self.char_dim = char_dim
        self.char_hidden = char_hidden
        self.flag_dim = flag_dim
        self.sent_hidden = sent_hidden
        self.mlp_hidden = mlp_hidden
        self.dropout = dropout
        self.epochs = epochs
        self.lr = lr
        self.momentum = momentum
        self.clip_norm = clip_norm
        self.patience = patience
        self.use_projection = use_projection
        self.seed = seed

    def fit(self, X, dev=None, resources: LangIdResources | None = None):
        sentences = check_sentences(X)
        self.resources_ = resources if resources is not None else LangIdResources()
        for sent in sentences:
            for tok in sent:
                if tok.lang is None:
                    raise DataError(f"token {tok.form!r} has no language tag")
        self.char_vocab_ = [CHAR_UNK] + sorted({c for s in sentences for t in s for c in t.form})
        self._char_index = {c: i for i, c in enumerate(self.char_vocab_)}
        self._translit_cache = {}
        probe = featurize(
            sentences[0][0].form, self.resources_, self.use_projection, self._translit_cache
        )
        self.en_dim_ = len(probe.en_vec)
        self.hi_dim_ = len(probe.hi_vec)
        word_dim = self.en_dim_ + self.hi_dim_ + 2 * self.char_hidden + 2 * self.flag_dim
        rng = new_rng(self.seed)
        self.net_ = _LangIdNet(
            len(self.char_vocab_),
            self.char_dim,
            self.char_hidden,
            word_dim,
            self.flag_dim,
            self.sent_hidden,
            self.mlp_hidden,
            rng,
        )
        opt = Sgd(self.net_.params(), lr=self.lr, momentum=self.momentum, clip_norm=self.clip_norm)
        train_feats = [self._featurize_sentence(s) for s in sentences]
        golds = [[TAG_ORDER.index(t.lang) for t in s] for s in sentences]
        self.train_accuracy_ = []
        self.dev_accuracy_ = []
        best = None
        for epoch in range(1, self.epochs + 1):
            for si in rng.permutation(len(sentences)):
                losses = []
                logits = self._sentence_logits(train_feats[si], rng)
                for tok_logits, feats, gold in zip(logits, train_feats[si], golds[si]):
                    if is_rule_universal("".join(feats.chars)):
                        continue  # the rule decides these, no gradient needed
                    losses.append(softmax_xent(tok_logits, gold))
                if not losses:
                    continue
                backward(scale(add_n(losses), 1.0 / len(losses)))
                opt.step()
                opt.zero_grad()
            self.train_accuracy_.append(self.score(sentences))
            if dev is not None:
                acc = self.score(dev)
                self.dev_accuracy_.append(acc)
                if best is None or acc > best[0]:
                    best = (acc, [p.value.copy() for p in self.net_.params()])
                elif epoch - 1 - int(np.argmax(self.dev_accuracy_)) >= self.patience:
                    break
            elif self.train_accuracy_[-1] >= 100.0:
                break
        if best is not None:
            for p, value in zip(self.net_.params(), best[1]):
                p.value[...] = value
        return self

    def _featurize_sentence(self, sent: Sentence) -> list[LangIdFeatures]:
        return [
            featurize(t.form, self.resources_, self.use_projection, self._translit_cache)
            for t in sent
        ]

    def _sentence_logits(self, feats: list[LangIdFeatures], rng=None) -> list[Tensor]:
        vecs = []
        for f in feats:
            char_ids = [self._char_index.get(c, 0) for c in f.chars] or [0]
            parts = [
                Tensor(f.en_vec),
                Tensor(f.hi_vec),
                self.net_.char_repr(char_ids),
                self.net_.dict_emb(f.dict_flag),
                self.net_.len_emb(f.length_bin),
            ]
            vec = concat([p for p in parts if p.value.shape[0]])
            if rng is not None and self.dropout > 0:
                vec = mask_mul(vec, dropout_mask(vec.value.shape[0], self.dropout, rng))
            vecs.append(vec)
        hs = self.net_.sent_lstm.encode(vecs)
        out = []
        for h in hs:
            if rng is not None and self.dropout > 0:
                h = mask_mul(h, dropout_mask(h.value.shape[0], self.dropout, rng))
            out.append(self.net_.mlp(h))
        return out

    def predict(self, X) -> list[list[LangTag]]:
        check_fitted(self, "net_")
        sentences = check_sentences(X)
        out = []
        for sent in sentences:
            feats = self._featurize_sentence(sent)
            logits = self._sentence_logits(feats)
            tags = []
            for tok, tok_logits in zip(sent, logits):
                if is_rule_universal(tok.form):
                    tags.append(LangTag.UNIV)
                else:
                    tags.append(_decide(tok_logits.value))
            out.append(tags)
        return out

    def predict_proba(self, sentence: Sentence) -> np.ndarray:
        """Per-token tag distribution, rows in TAG_ORDER, rule ignored."""
        check_fitted(self, "net_")
        (sentence,) = check_sentences([sentence])
        logits = self._sentence_logits(self._featurize_sentence(sentence))
        return np.vstack([np.exp(log_softmax_values(l.value)) for l in logits])

    def score(self, X) -> float:
        """Token accuracy (percent) against gold ``lang`` tags."""
        sentences = check_sentences(X)
        gold = pred = 0
        for sent, tags in zip(sentences, self.predict(sentences)):
            for tok, tag in zip(sent, tags):
                pred += 1
                gold += int(tok.lang == tag)
        return 100.0 * gold / pred if pred else 0.0

    def save(self, path) -> None:
        check_fitted(self, "net_")
        hyper = self.get_params()
        hyper["char_vocab"] = self.char_vocab_
        hyper["en_dim"] = self.en_dim_
        hyper["hi_dim"] = self.hi_dim_
        save_model(
            path, "langid", hyper, {name: p.value for name, p in self.net_.named_params()}
        )

    @classmethod
    def load(cls, path, resources: LangIdResources | None = None) -> "LanguageIdentifier":
        hyper, arrays = load_model(path, expect_kind="langid")
        char_vocab = hyper.pop("char_vocab")
        en_dim = hyper.pop("en_dim")
        hi_dim = hyper.pop("hi_dim")
        model = cls(**hyper)
        model.resources_ = resources if resources is not None else LangIdResources()
        model.char_vocab_ = list(char_vocab)
        model._char_index = {c: i for i, c in enumerate(model.char_vocab_)}
        model._translit_cache = {}
        model.en_dim_ = en_dim
        model.hi_dim_ = hi_dim
        word_dim = en_dim + hi_dim + 2 * model.char_hidden + 2 * model.flag_dim
        model.net_ = _LangIdNet(
            len(char_vocab),
            model.char_dim,
            model.char_hidden,
            word_dim,
            model.flag_dim,
            model.sent_hidden,
            model.mlp_hidden,
            new_rng(model.seed),
        )
        model.train_accuracy_ = []
        model.dev_accuracy_ = []
        for name, param in model.net_.named_params():
            if name not in arrays:
                raise ModelError(f"missing parameter {name}")
            if arrays[name].shape != param.value.shape:
                raise ModelError(f"parameter {name} shape mismatch")
            param.value[...] = arrays[name]
        return model


def _decide(logits: np.ndarray) -> LangTag:
    # np.argmax takes the first maximum, which is exactly the fixed
    # hi > en > ne > acro > univ preference
    return TAG_ORDER[int(np.argmax(logits))]


def predict_tags(model: LanguageIdentifier, sentence: Sentence) -> list[LangTag]:
    return model.predict([sentence])[0]


def train_langid(train, dev=None, resources: LangIdResources | None = None, **hyper):
    model = LanguageIdentifier(**hyper)
    model.fit(train, dev=dev, resources=resources)
    return model


def load_tagged_corpus(path) -> list[Sentence]:
    """Read a "form<TAB>tag" file, blank lines separating sentences."""
    from .conllu import Token

    sentences = []
    tokens = []
    with open(str(path), encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                if tokens:
                    sentences.append(Sentence(tokens=tokens))
                    tokens = []
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"line {lineno}: expected form<TAB>tag, got {line!r}")
            form, tag = parts
            if not form:
                raise DataError(f"line {lineno}: empty form")
            try:
                lang = parse_lang_tag(tag)
            except Exception as exc:
                raise DataError(f"line {lineno}: {exc}") from exc
            tokens.append(Token(index=len(tokens) + 1, form=form, lang=lang))
    if tokens:
        sentences.append(Sentence(tokens=tokens))
    if not sentences:
        raise DataError(f"{path}: no sentences")
    return sentences
