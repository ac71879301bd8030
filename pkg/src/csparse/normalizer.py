"""Character-level normalization and back-transliteration.

Two instances of the same attention encoder-decoder cover the two noisy
vocabularies: one maps Romanized Hindi to Devanagari, the other maps
noisy English to standard English.  Training pairs for English come from
a rule-based noise generator over a clean wordlist; decoding exposes the
n-best list that sentence-level search consumes.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .base import BaseEstimator, check_fitted, new_rng
from .errors import DataError, ModelError
from .nn import (
    BiLstm,
    Embedding,
    Layer,
    Lstm,
    LuongAttention,
    Parameter,
    Sgd,
    add,
    add_n,
    backward,
    concat,
    dropout_mask,
    load_model,
    log_softmax_values,
    mask_mul,
    matvec,
    save_model,
    scale,
    softmax_xent,
    stack_rows,
    tanh,
    xavier_init,
)

BOS_CHAR = "<s>"
EOS_CHAR = "</s>"
UNK_CHAR = "<unk>"
SPECIALS = (BOS_CHAR, EOS_CHAR, UNK_CHAR)

VOWELS = "aeiou"


class NoiseRuleSet:
    """Hand-crafted noising rules: vowel elision, phonologically close
    substitutions, and cluster collapse."""

    def __init__(self, substitutions):
        subs = [(str(a), str(b)) for a, b in substitutions]
        for a, b in subs:
            if not a or not b:
                raise DataError("empty substitution side")
        self.substitutions = subs

    @classmethod
    def default(cls) -> "NoiseRuleSet":
        path = resources.files("csparse").joinpath("data/phonological_rules.json")
        return cls.load(path)

    @classmethod
    def load(cls, path) -> "NoiseRuleSet":
        with open(str(path), encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DataError(f"bad rule file {path}: {exc}") from exc
        if "substitutions" not in payload:
            raise DataError(f"rule file {path} has no 'substitutions' entry")
        return cls(payload["substitutions"])

    def vowel_elision(self, word: str) -> list[str]:
        """Drop non-initial vowels: all at once, then one at a time."""
        out = []
        stripped = word[0] + "".join(c for c in word[1:] if c not in VOWELS)
        if stripped != word:
            out.append(stripped)
        for i in range(1, len(word)):
            if word[i] in VOWELS:
                out.append(word[:i] + word[i + 1 :])
        return _uniq(out)

    def substitute(self, word: str) -> list[str]:
        out = []
        for src, tgt in self.substitutions:
            start = 0
            while True:
                i = word.find(src, start)
                if i < 0:
                    break
                out.append(word[:i] + tgt + word[i + len(src) :])
                start = i + 1
        return _uniq(out)

    def collapse_clusters(self, word: str) -> list[str]:
        """Replace a doubled letter with a single one."""
        out = []
        for i in range(len(word) - 1):
            if word[i] == word[i + 1]:
                out.append(word[:i] + word[i + 1 :])
        return _uniq(out)

    def variants(self, word: str) -> list[str]:
        """All single-rule noisy forms, rule order preserved, word itself
        excluded."""
        pool = self.vowel_elision(word) + self.substitute(word) + self.collapse_clusters(word)
        return [v for v in _uniq(pool) if v != word and v]


def _uniq(items):
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def gen_synthetic_pairs(
    vocab, rules: NoiseRuleSet | None = None, seed=0, max_per_word: int = 4
) -> list[tuple[str, str]]:
    """Noisy/clean training pairs from a clean wordlist.

    Every noisy form is reachable from its clean form by at most two
    rule applications; the sampled subset is deterministic per seed.
    Words no rule touches are kept as identity pairs.
    """
    if rules is None:
        rules = NoiseRuleSet.default()
    rng = new_rng(seed)
    pairs = []
    for raw in vocab:
        word = raw.strip().lower()
        if not word:
            continue
        one_step = rules.variants(word)
        pool = list(one_step)
        for base in one_step[:2]:
            pool.extend(v for v in rules.variants(base) if v != word)
        pool = _uniq(pool)
        if not pool:
            pairs.append((word, word))
            continue
        take = min(max_per_word, len(pool))
        picked = rng.choice(len(pool), size=take, replace=False)
        for i in sorted(picked):
            pairs.append((pool[i], word))
    return pairs


@dataclass(frozen=True)
class CandidateSet:
    """n-best normalizations of one word, scores non-increasing."""

    word: str
    candidates: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.candidates:
            raise DataError(f"no candidates for {self.word!r}")
        scores = [s for _, s in self.candidates]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise DataError("candidate scores must be non-increasing")
        words = [w for w, _ in self.candidates]
        if len(set(words)) != len(words):
            raise DataError("duplicate candidate")

    @property
    def best(self) -> str:
        return self.candidates[0][0]

    def words(self) -> list[str]:
        return [w for w, _ in self.candidates]


class _Seq2SeqNet(Layer):
    """Encoder-decoder with global bilinear attention."""

    def __init__(self, n_src: int, n_tgt: int, char_dim: int, hidden_dim: int, rng):
        self.src_emb = Embedding(n_src, char_dim, rng)
        self.tgt_emb = Embedding(n_tgt, char_dim, rng)
        self.encoder = BiLstm(char_dim, hidden_dim, rng)
        self.decoder = Lstm(char_dim, hidden_dim, rng)
        self.attn = LuongAttention(hidden_dim, 2 * hidden_dim, rng)
        # bridge the final encoder state into the decoder start state
        self.w_bridge_h = Parameter(xavier_init(hidden_dim, 2 * hidden_dim, rng))
        self.w_bridge_c = Parameter(xavier_init(hidden_dim, 2 * hidden_dim, rng))
        self.w_comb = Parameter(xavier_init(hidden_dim, 3 * hidden_dim, rng))
        self.w_out = Parameter(xavier_init(n_tgt, hidden_dim, rng))
        self.b_out = Parameter(np.zeros(n_tgt))
        self.hidden_dim = hidden_dim

    def encode(self, src_ids, drop_rate: float = 0.0, drop_rng=None):
        xs = [self.src_emb(i) for i in src_ids]
        hs = self.encoder.encode(xs)
        if drop_rate > 0.0:
            hs = [
                mask_mul(h, dropout_mask(2 * self.hidden_dim, drop_rate, drop_rng))
                for h in hs
            ]
        memory = stack_rows(hs)
        state = (
            tanh(matvec(self.w_bridge_h, hs[-1])),
            tanh(matvec(self.w_bridge_c, hs[-1])),
        )
        return memory, state

    def decode_step(self, prev_id: int, state, memory, drop_rate: float = 0.0, drop_rng=None):
        h, c = self.decoder.step(self.tgt_emb(prev_id), state)
        context, _ = self.attn(h, memory)
        att_h = tanh(matvec(self.w_comb, concat([context, h])))
        if drop_rate > 0.0:
            att_h = mask_mul(att_h, dropout_mask(self.hidden_dim, drop_rate, drop_rng))
        logits = add(matvec(self.w_out, att_h), self.b_out)
        return logits, (h, c)


class CharacterNormalizer(BaseEstimator):
    """Seq2seq word normalizer with beam-search n-best decoding.

    fit(X, y) takes parallel lists of noisy and clean word forms, both
    lowercased internally.  Inference restores the input's casing
    whenever a candidate equals the input modulo case.
    """

    def __init__(
        self,
        char_dim: int = 32,
        hidden_dim: int = 512,
        epochs: int = 25,
        batch_size: int = 128,
        lr: float = 1.0,
        lr_decay_start: int = 8,
        clip_norm: float = 5.0,
        dropout: float = 0.3,
        beam_width: int = 5,
        max_len_factor: int = 3,
        max_len_extra: int = 5,
        seed: int = 0,
    ):
        self.char_dim = char_dim
        self.hidden_dim = hidden_dim
        self.epochs = epochs
        self.batch_size = batch_size
        self.lr = lr
        self.lr_decay_start = lr_decay_start
        self.clip_norm = clip_norm
        self.dropout = dropout
        self.beam_width = beam_width
        self.max_len_factor = max_len_factor
        self.max_len_extra = max_len_extra
        self.seed = seed

    def fit(self, X, y, dev=None):
        pairs = _clean_pairs(X, y)
        if not pairs:
            raise DataError("no training pairs")
        self.src_vocab_ = list(SPECIALS) + sorted({c for s, _ in pairs for c in s})
        self.tgt_vocab_ = list(SPECIALS) + sorted({c for _, t in pairs for c in t})
        self._src_index = {c: i for i, c in enumerate(self.src_vocab_)}
        self._tgt_index = {c: i for i, c in enumerate(self.tgt_vocab_)}
        rng = new_rng(self.seed)
        self.net_ = _Seq2SeqNet(
            len(self.src_vocab_), len(self.tgt_vocab_), self.char_dim, self.hidden_dim, rng
        )
        opt = Sgd(self.net_.params(), lr=self.lr, clip_norm=self.clip_norm)
        self.loss_history_ = []
        self.dev_accuracy_ = []
        for epoch in range(1, self.epochs + 1):
            if epoch > self.lr_decay_start:
                opt.lr = self.lr / 2 ** (epoch - self.lr_decay_start)
            order = rng.permutation(len(pairs))
            total = 0.0
            for lo in range(0, len(order), self.batch_size):
                batch = [pairs[i] for i in order[lo : lo + self.batch_size]]
                losses = [self._word_loss(s, t, rng) for s, t in batch]
                loss = scale(add_n(losses), 1.0 / len(losses))
                backward(loss)
                opt.step()
                opt.zero_grad()
                total += float(loss.value) * len(losses)
            self.loss_history_.append(total / len(pairs))
            if dev:
                self.dev_accuracy_.append(self.score([s for s, _ in dev], [t for _, t in dev]))
        return self

    def _word_loss(self, src: str, tgt: str, rng):
        memory, state = self.net_.encode(
            self._encode_src(src), drop_rate=self.dropout, drop_rng=rng
        )
        prev = self._tgt_index[BOS_CHAR]
        golds = [self._tgt_index[c] for c in tgt] + [self._tgt_index[EOS_CHAR]]
        losses = []
        for gold in golds:
            logits, state = self.net_.decode_step(
                prev, state, memory, drop_rate=self.dropout, drop_rng=rng
            )
            losses.append(softmax_xent(logits, gold))
            prev = gold
        return add_n(losses)

    def _encode_src(self, word: str) -> list[int]:
        unk = self._src_index[UNK_CHAR]
        ids, misses = [], 0
        for c in word:
            i = self._src_index.get(c)
            if i is None:
                misses += 1
                i = unk
            ids.append(i)
        if misses:
            warnings.warn(f"{misses} character(s) outside the source vocabulary mapped to UNK")
        return ids

    def _max_len(self, word: str) -> int:
        return self.max_len_factor * len(word) + self.max_len_extra

    def candidates(self, word: str, b: int | None = None) -> CandidateSet:
        """``b``-best normalizations by length-bounded beam search."""
        check_fitted(self, "net_")
        if b is None:
            b = self.beam_width
        if b < 1:
            raise DataError(f"beam width must be >= 1, got {b}")
        if not word:
            raise DataError("cannot normalize an empty word")
        lowered = word.lower()
        completed = self._beam_search(lowered, b)
        out = []
        for score, chars in completed:
            text = "".join(chars)
            if text.lower() == lowered:
                text = word
            out.append((text, score))
        # distinct surface forms, best score first
        best: dict[str, float] = {}
        for text, score in out:
            if text not in best or score > best[text]:
                best[text] = score
        ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))[:b]
        return CandidateSet(word=word, candidates=tuple(ranked))

    def _beam_search(self, word: str, b: int):
        """Top-``b`` completed hypotheses as (logprob, char tuple)."""
        eos = self._tgt_index[EOS_CHAR]
        memory, state = self.net_.encode(self._encode_src(word))
        max_len = self._max_len(word)
        beams = [(0.0, (), self._tgt_index[BOS_CHAR], state)]
        completed: list[tuple[float, tuple[str, ...]]] = []
        while beams:
            pool = []
            for score, chars, prev, st in beams:
                logits, new_state = self.net_.decode_step(prev, st, memory)
                logps = log_softmax_values(logits.value)
                if len(chars) >= max_len:
                    pool.append((score + logps[eos], chars, None, None))
                    continue
                for tid, lp in enumerate(logps):
                    if tid == eos:
                        pool.append((score + lp, chars, None, None))
                    elif self.tgt_vocab_[tid] not in SPECIALS:
                        pool.append(
                            (score + lp, chars + (self.tgt_vocab_[tid],), tid, new_state)
                        )
            pool.sort(key=lambda item: (-item[0], item[1]))
            beams = []
            for score, chars, tid, st in pool[:b]:
                if tid is None:
                    completed.append((score, chars))
                else:
                    beams.append((score, chars, tid, st))
            # alive scores only decrease, so nothing can still displace
            # the completed top b once the best prefix falls below them
            if len(completed) >= b and (
                not beams or beams[0][0] < min(s for s, _ in completed)
            ):
                break
        completed.sort(key=lambda item: (-item[0], item[1]))
        return completed[:b]

    def greedy_decode(self, word: str) -> str:
        """Single most-likely output, following the argmax at each step."""
        check_fitted(self, "net_")
        if not word:
            raise DataError("cannot normalize an empty word")
        eos = self._tgt_index[EOS_CHAR]
        memory, state = self.net_.encode(self._encode_src(word.lower()))
        prev = self._tgt_index[BOS_CHAR]
        chars = []
        for _ in range(self._max_len(word)):
            logits, state = self.net_.decode_step(prev, state, memory)
            logps = log_softmax_values(logits.value)
            order = sorted(range(len(logps)), key=lambda i: (-logps[i], i))
            nxt = next(i for i in order if i == eos or self.tgt_vocab_[i] not in SPECIALS)
            if nxt == eos:
                break
            chars.append(self.tgt_vocab_[nxt])
            prev = nxt
        text = "".join(chars)
        return word if text.lower() == word.lower() else text

    def predict(self, X) -> list[str]:
        return [self.candidates(w).best for w in X]

    def score(self, X, y) -> float:
        """Exact-match accuracy of the first-best output."""
        preds = self.predict(X)
        golds = [t.lower() for t in y]
        hits = sum(1 for p, g in zip(preds, golds) if p.lower() == g)
        return 100.0 * hits / len(golds) if golds else 0.0

    def save(self, path) -> None:
        check_fitted(self, "net_")
        hyper = self.get_params()
        hyper["src_vocab"] = self.src_vocab_
        hyper["tgt_vocab"] = self.tgt_vocab_
        save_model(
            path, "char-normalizer", hyper,
            {name: p.value for name, p in self.net_.named_params()},
        )

    @classmethod
    def load(cls, path) -> "CharacterNormalizer":
        hyper, arrays = load_model(path, expect_kind="char-normalizer")
        src_vocab = hyper.pop("src_vocab")
        tgt_vocab = hyper.pop("tgt_vocab")
        model = cls(**hyper)
        model.src_vocab_ = list(src_vocab)
        model.tgt_vocab_ = list(tgt_vocab)
        model._src_index = {c: i for i, c in enumerate(model.src_vocab_)}
        model._tgt_index = {c: i for i, c in enumerate(model.tgt_vocab_)}
        model.net_ = _Seq2SeqNet(
            len(src_vocab), len(tgt_vocab), model.char_dim, model.hidden_dim, new_rng(model.seed)
        )
        model.loss_history_ = []
        model.dev_accuracy_ = []
        for name, param in model.net_.named_params():
            if name not in arrays:
                raise ModelError(f"missing parameter {name}")
            if arrays[name].shape != param.value.shape:
                raise ModelError(
                    f"parameter {name} has shape {arrays[name].shape}, "
                    f"expected {param.value.shape}"
                )
            param.value[...] = arrays[name]
        return model


def _clean_pairs(X, y):
    X, y = list(X), list(y)
    if len(X) != len(y):
        raise DataError(f"{len(X)} source words vs {len(y)} targets")
    pairs = []
    for s, t in zip(X, y):
        s, t = str(s).strip().lower(), str(t).strip().lower()
        if not s or not t:
            raise DataError("empty word in training pairs")
        pairs.append((s, t))
    return pairs


def train_seq2seq(pairs, dev_pairs=None, **hyper) -> CharacterNormalizer:
    """Train a normalizer from (noisy, clean) pairs."""
    model = CharacterNormalizer(**hyper)
    model.fit([s for s, _ in pairs], [t for _, t in pairs], dev=dev_pairs)
    return model


def beam_decode(model: CharacterNormalizer, word: str, b: int | None = None) -> CandidateSet:
    return model.candidates(word, b=b)


BYPASS_TAGS = frozenset({"ne", "acro", "univ"})


def normalize_candidates(
    model: CharacterNormalizer | None, form: str, tag=None, b: int | None = None
) -> CandidateSet:
    """Candidates for one token; named entities, acronyms and universal
    tokens pass through untouched."""
    tag_value = getattr(tag, "value", tag)
    if tag_value in BYPASS_TAGS or model is None:
        return CandidateSet(word=form, candidates=((form, 0.0),))
    return model.candidates(form, b=b)
