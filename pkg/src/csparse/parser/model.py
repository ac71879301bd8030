"""Joint UPOS tagging and arc-eager parsing with stack-propagation.

One shared sentence Bi-LSTM feeds two branches.  The tagger branch runs
its own Bi-LSTM and a tanh MLP over the Universal POS inventory; the
parser branch runs a second Bi-LSTM whose input concatenates the shared
states, the tagger's MLP hidden layer and the raw word/char inputs, then
classifies labeled transitions from the stack-top and buffer-front
hidden vectors.  Both losses are summed per sentence and backpropagated
in one pass, so the shared parameters absorb tagging and parsing
gradients simultaneously while parser-only parameters see only the
parsing loss.

Training follows the dynamic oracle: the loss target at each
configuration is the cheapest transition (preferring the model's
favourite among equally cheap ones), and decoding during training may
follow model mistakes to expose error states.

A fitted source model can be stacked underneath a second model.  Its
tagger MLP hidden layer augments the target tagger's input, its parser
Bi-LSTM states augment the target parser's input, and its parser MLP
hidden layer (computed on the target's own parser configurations) feeds
the target parser's MLP.  All three contributions enter through bridge
matrices, so zeroing the bridges recovers the plain model exactly.
"""

from __future__ import annotations

import numpy as np

from ..base import BaseEstimator, check_fitted, check_sentences, new_rng
from ..conllu import Sentence, Token, validate_tree
from ..embeddings import EmbeddingSpace, lookup
from ..errors import DataError, ModelError
from ..metrics import EvalReport, attachment_scores
from ..nn.init import uniform_init, xavier_init
from ..nn.io import load_model, save_model
from ..nn.layers import BiLstm, Embedding, Layer, dropout_mask
from ..nn.optim import Sgd
from ..nn.tensor import (
    Parameter,
    Tensor,
    add,
    add_n,
    backward,
    concat,
    constant,
    mask_mul,
    matvec,
    softmax_xent,
    tanh,
)
from .oracle import transition_cost
from .projectivity import deprojectivize, is_projective
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

CHAR_UNK = "<unk>"

# Logit offset that removes a transition from both argmax and softmax
# without leaving the finite-float range.
ILLEGAL = -1e9


class _StackPropNet(Layer):
    """Parameter container for one tagger+parser network.

    Plain layers are always created first and in a fixed order, so two
    nets built from equally seeded generators share identical plain
    weights whether or not the stacking bridges (created last) exist.
    """

    def __init__(
        self,
        rng,
        word_dim: int,
        n_chars: int,
        n_upos: int,
        n_transitions: int,
        char_dim: int,
        char_hidden: int,
        shared_hidden: int,
        tagger_hidden: int,
        tagger_mlp: int,
        parser_mlp: int,
        parser_hidden: int,
        pos_dim: int,
        pipeline: bool,
        source_dims: tuple[int, int, int] | None,
    ):
        self.char_emb = Embedding(n_chars, char_dim, rng)
        self.char_lstm = BiLstm(char_dim, char_hidden, rng)
        input_dim = word_dim + 2 * char_hidden
        if pipeline:
            # extra row = tags outside the training inventory
            self.pos_emb = Embedding(n_upos + 1, pos_dim, rng)
            input_dim += pos_dim
        self.input_dim = input_dim
        self.shared = BiLstm(input_dim, shared_hidden, rng)
        if not pipeline:
            self.tagger = BiLstm(2 * shared_hidden, tagger_hidden, rng)
            self.w_tag1 = Parameter(xavier_init(tagger_mlp, 2 * tagger_hidden, rng))
            self.b_tag1 = Parameter(np.zeros(tagger_mlp))
            self.w_tag2 = Parameter(xavier_init(n_upos, tagger_mlp, rng))
            self.b_tag2 = Parameter(np.zeros(n_upos))
        parser_in = 2 * shared_hidden + (0 if pipeline else tagger_mlp) + input_dim
        self.parser_in_dim = parser_in
        self.parser = BiLstm(parser_in, parser_hidden, rng)
        feat_dim = 2 * self.parser.output_dim
        self.w_par1 = Parameter(xavier_init(parser_mlp, feat_dim, rng))
        self.b_par1 = Parameter(np.zeros(parser_mlp))
        self.w_par2 = Parameter(xavier_init(n_transitions, parser_mlp, rng))
        self.b_par2 = Parameter(np.zeros(n_transitions))
        # stand-ins for positions with no parser Bi-LSTM state
        self.root_vec = Parameter(uniform_init((self.parser.output_dim,), rng))
        self.pad_vec = Parameter(uniform_init((self.parser.output_dim,), rng))
        if source_dims is not None:
            # zero start: the stacked net begins at the plain net's exact
            # function and no gradient reaches the source until the
            # bridges move off zero, which protects both models early on
            src_tag_mlp, src_parser_out, src_parser_mlp = source_dims
            self.w_src_tag = Parameter(np.zeros((input_dim, src_tag_mlp)))
            self.w_src_parser_in = Parameter(np.zeros((parser_in, src_parser_out)))
            self.w_src_parser_mlp = Parameter(np.zeros((parser_mlp, src_parser_mlp)))


class _Forward:
    """Sentence-level tensors shared by every configuration."""

    __slots__ = ("inputs", "shared_out", "tag_hiddens", "tag_logits", "parser_out")

    def __init__(self, inputs, shared_out, tag_hiddens, tag_logits, parser_out):
        self.inputs = inputs
        self.shared_out = shared_out
        self.tag_hiddens = tag_hiddens
        self.tag_logits = tag_logits
        self.parser_out = parser_out


class StackPropParser(BaseEstimator):
    """Joint POS tagger and greedy arc-eager dependency parser.

    Parameters
    ----------
    embeddings : EmbeddingSpace or None
        Pre-trained word vectors used as fixed input features.  ``None``
        runs on character features alone.
    source : StackPropParser or None
        Fitted model whose tagger and parser layers are stacked under
        this model through trainable bridge matrices.
    freeze_source : bool
        Exclude the source model's own weights from the update (only the
        bridges learn).  By default gradients flow into the source too.
    pipeline : bool
        Drop the tagger branch and consume POS tags as input features
        instead; every token must then carry ``upos``.
    char_dim, char_hidden : int
        Character embedding size and per-direction character LSTM cells.
    shared_hidden, tagger_hidden, parser_hidden : int
        Per-direction cells of the shared, tagger and parser Bi-LSTMs.
    tagger_mlp, parser_mlp : int
        Hidden sizes of the two classifier MLPs.
    pos_dim : int
        POS-tag embedding size (pipeline mode only).
    dropout : float
        Rate applied to Bi-LSTM outputs and MLP hidden layers while
        training.
    epochs, lr, momentum, clip_norm, patience : training schedule
        Momentum SGD with minibatch size 1; with a dev set, training
        stops ``patience`` epochs after the best dev LAS and the best
        weights are restored.
    explore_prob, explore_after : float, int
        After ``explore_after`` epochs, follow a costly model prediction
        with this probability instead of the oracle transition.
    seed : int
        Seeds initialization, shuffling, dropout and exploration.
    """

    def __init__(
        self,
        embeddings: EmbeddingSpace | None = None,
        source: "StackPropParser | None" = None,
        freeze_source: bool = False,
        pipeline: bool = False,
        char_dim: int = 32,
        char_hidden: int = 32,
        shared_hidden: int = 128,
        tagger_hidden: int = 128,
        tagger_mlp: int = 128,
        parser_hidden: int = 256,
        parser_mlp: int = 256,
        pos_dim: int = 32,
        dropout: float = 0.3,
        epochs: int = 100,
        lr: float = 0.1,
        momentum: float = 0.9,
        clip_norm: float | None = 5.0,
        patience: int = 5,
        explore_prob: float = 0.1,
        explore_after: int = 1,
        seed: int = 0,
    ):
        self.embeddings = embeddings
        self.source = source
        self.freeze_source = freeze_source
        self.pipeline = pipeline
        self.char_dim = char_dim
        self.char_hidden = char_hidden
        self.shared_hidden = shared_hidden
        self.tagger_hidden = tagger_hidden
        self.tagger_mlp = tagger_mlp
        self.parser_hidden = parser_hidden
        self.parser_mlp = parser_mlp
        self.pos_dim = pos_dim
        self.dropout = dropout
        self.epochs = epochs
        self.lr = lr
        self.momentum = momentum
        self.clip_norm = clip_norm
        self.patience = patience
        self.explore_prob = explore_prob
        self.explore_after = explore_after
        self.seed = seed

    # ------------------------------------------------------------------
    # fitting

    def fit(self, X, y=None, dev=None) -> "StackPropParser":
        """Train on projectivized gold sentences.

        Every token needs a head, a deprel and a UPOS tag; non-projective
        trees are rejected (run ``projectivize`` first).  ``dev`` enables
        early stopping on labeled attachment score.
        """
        X = check_sentences(X)
        self._check_training_data(X)
        if dev is not None:
            dev = check_sentences(dev)
            for i, sent in enumerate(dev):
                if not sent.is_parsed():
                    raise DataError(f"dev sentence {i}: unparsed tokens")
        if self.source is not None:
            if self.pipeline:
                raise ValueError("stacking requires the joint model, not pipeline mode")
            check_fitted(self.source, "net_")
            if self.source.pipeline:
                raise ValueError("source model must be a joint tagger+parser")

        chars = sorted({c for sent in X for tok in sent for c in tok.best_form})
        self.char_vocab_ = [CHAR_UNK] + chars
        self.char_index_ = {c: i for i, c in enumerate(self.char_vocab_)}
        self.upos_tags_ = sorted({tok.upos for sent in X for tok in sent})
        self.upos_index_ = {u: i for i, u in enumerate(self.upos_tags_)}
        left, right = set(), set()
        for sent in X:
            for tok in sent:
                (left if tok.head > tok.index else right).add(tok.deprel)
        self.transitions_ = (
            [Transition(SHIFT), Transition(REDUCE)]
            + [Transition(LEFT, lab) for lab in sorted(left)]
            + [Transition(RIGHT, lab) for lab in sorted(right)]
        )
        self.word_dim_ = self.embeddings.dim if self.embeddings is not None else 0

        rng = new_rng(self.seed)
        self.net_ = _StackPropNet(
            rng,
            word_dim=self.word_dim_,
            n_chars=len(self.char_vocab_),
            n_upos=len(self.upos_tags_),
            n_transitions=len(self.transitions_),
            char_dim=self.char_dim,
            char_hidden=self.char_hidden,
            shared_hidden=self.shared_hidden,
            tagger_hidden=self.tagger_hidden,
            tagger_mlp=self.tagger_mlp,
            parser_mlp=self.parser_mlp,
            parser_hidden=self.parser_hidden,
            pos_dim=self.pos_dim,
            pipeline=self.pipeline,
            source_dims=self._source_dims(),
        )
        train_params = self.net_.params()
        if self.source is not None and not self.freeze_source:
            train_params = train_params + self.source.net_.params()
        opt = Sgd(train_params, lr=self.lr, momentum=self.momentum, clip_norm=self.clip_norm)

        self.loss_history_: list[float] = []
        self.dev_las_history_: list[float] = []
        best: list[np.ndarray] | None = None
        order = np.arange(len(X))
        for epoch in range(1, self.epochs + 1):
            rng.shuffle(order)
            total = 0.0
            for idx in order:
                loss = self._sentence_loss(X[int(idx)], epoch, rng)
                backward(loss)
                opt.step()
                opt.zero_grad()
                total += float(loss.value)
            self.loss_history_.append(total / len(X))
            if dev is None:
                continue
            las = self.evaluate(dev).las
            previous_best = max(self.dev_las_history_, default=-1.0)
            self.dev_las_history_.append(las)
            if las > previous_best:
                best = [p.value.copy() for p in opt.params]
            if epoch - 1 - int(np.argmax(self.dev_las_history_)) >= self.patience:
                break
        if best is not None:
            for p, value in zip(opt.params, best):
                p.value[...] = value
        return self

    def _check_training_data(self, X: list[Sentence]) -> None:
        for i, sent in enumerate(X):
            for tok in sent:
                if tok.head is None or tok.deprel is None:
                    raise DataError(f"sentence {i}, token {tok.index}: no gold arc")
                if tok.upos is None:
                    raise DataError(f"sentence {i}, token {tok.index}: no UPOS tag")
            problems = validate_tree(sent)
            if problems:
                raise DataError(f"sentence {i}: {'; '.join(problems)}")
            if not is_projective(sent):
                raise DataError(
                    f"sentence {i}: non-projective tree; projectivize the treebank first"
                )

    def _source_dims(self) -> tuple[int, int, int] | None:
        if self.source is None:
            return None
        src = self.source
        return (src.tagger_mlp, src.net_.parser.output_dim, src.parser_mlp)

    # ------------------------------------------------------------------
    # forward pass

    def _prepare(self, sent: Sentence) -> list[tuple]:
        """Per-token (word vector, char ids, POS id) using fitted vocabs."""
        prepared = []
        for tok in sent:
            form = tok.best_form
            word = lookup(self.embeddings, form) if self.embeddings is not None else None
            chars = [self.char_index_.get(c, 0) for c in form] or [0]
            pos = None
            if self.pipeline:
                pos = self.upos_index_.get(tok.upos, len(self.upos_tags_))
            prepared.append((word, chars, pos))
        return prepared

    def _forward(self, prepared, src_fwd: _Forward | None = None, drop_rng=None) -> _Forward:
        net = self.net_

        def drop(t: Tensor) -> Tensor:
            if drop_rng is None or self.dropout == 0.0:
                return t
            return mask_mul(t, dropout_mask(t.value.shape[0], self.dropout, drop_rng))

        inputs = []
        for word, chars, pos in prepared:
            cvecs = [net.char_emb(i) for i in chars]
            parts = [] if word is None else [constant(word)]
            parts.append(net.char_lstm.fwd.run(cvecs)[-1])
            parts.append(net.char_lstm.bwd.run(cvecs[::-1])[-1])
            if pos is not None:
                parts.append(net.pos_emb(pos))
            inputs.append(concat(parts))
        shared_in = inputs
        if src_fwd is not None:
            shared_in = [
                add(vec, matvec(net.w_src_tag, hid))
                for vec, hid in zip(inputs, src_fwd.tag_hiddens)
            ]
        shared_out = [drop(h) for h in net.shared.encode(shared_in)]
        tag_hiddens = tag_logits = None
        if not self.pipeline:
            tag_hiddens, tag_logits = [], []
            for h in net.tagger.encode(shared_out):
                hid = drop(tanh(add(matvec(net.w_tag1, drop(h)), net.b_tag1)))
                tag_hiddens.append(hid)
                tag_logits.append(add(matvec(net.w_tag2, hid), net.b_tag2))
        parser_in = []
        for i, vec in enumerate(inputs):
            parts = [shared_out[i]]
            if tag_hiddens is not None:
                parts.append(tag_hiddens[i])
            parts.append(vec)
            combined = concat(parts)
            if src_fwd is not None:
                combined = add(combined, matvec(net.w_src_parser_in, src_fwd.parser_out[i]))
            parser_in.append(combined)
        parser_out = [drop(h) for h in net.parser.encode(parser_in)]
        return _Forward(inputs, shared_out, tag_hiddens, tag_logits, parser_out)

    def _node_vec(self, fwd: _Forward, index: int) -> Tensor:
        return self.net_.root_vec if index == 0 else fwd.parser_out[index - 1]

    def _mlp_hidden(self, fwd: _Forward, config: ParserConfig) -> Tensor:
        """Parser MLP hidden vector for a configuration, pre-dropout."""
        net = self.net_
        front = config.buffer[0] if config.buffer else None
        feat = concat(
            [
                self._node_vec(fwd, config.stack[-1]),
                net.pad_vec if front is None else self._node_vec(fwd, front),
            ]
        )
        return tanh(add(matvec(net.w_par1, feat), net.b_par1))

    def _config_logits(
        self,
        fwd: _Forward,
        config: ParserConfig,
        src_fwd: _Forward | None = None,
        drop_rng=None,
    ) -> Tensor:
        net = self.net_
        front = config.buffer[0] if config.buffer else None
        feat = concat(
            [
                self._node_vec(fwd, config.stack[-1]),
                net.pad_vec if front is None else self._node_vec(fwd, front),
            ]
        )
        pre = add(matvec(net.w_par1, feat), net.b_par1)
        if src_fwd is not None:
            src_hidden = self.source._mlp_hidden(src_fwd, config)
            pre = add(pre, matvec(net.w_src_parser_mlp, src_hidden))
        hidden = tanh(pre)
        if drop_rng is not None and self.dropout > 0.0:
            hidden = mask_mul(
                hidden, dropout_mask(hidden.value.shape[0], self.dropout, drop_rng)
            )
        return add(matvec(net.w_par2, hidden), net.b_par2)

    def _source_forward(self, sent: Sentence) -> _Forward | None:
        if self.source is None:
            return None
        return self.source._forward(self.source._prepare(sent))

    # ------------------------------------------------------------------
    # training loss

    def _legal_mask(self, ops: set[str]) -> np.ndarray:
        mask = np.full(len(self.transitions_), ILLEGAL)
        for i, t in enumerate(self.transitions_):
            if t.op in ops:
                mask[i] = 0.0
        return mask

    def _transition_costs(
        self, config: ParserConfig, heads: list[int], labels: list[str], ops: set[str]
    ) -> np.ndarray:
        """Dynamic-oracle cost of every inventory transition (inf = illegal).

        The cost of an arc transition depends on its label only when the
        created arc is gold, where a wrong label forfeits exactly that
        arc's labeled score.
        """
        top = config.stack[-1]
        front = config.buffer[0] if config.buffer else None
        base: dict[str, int] = {}
        for op in ops:
            if op == LEFT:
                probe = Transition(LEFT, labels[top])
            elif op == RIGHT:
                probe = Transition(RIGHT, labels[front])
            else:
                probe = Transition(op)
            base[op] = transition_cost(config, probe, heads, labels)
        costs = np.full(len(self.transitions_), np.inf)
        for i, t in enumerate(self.transitions_):
            c = base.get(t.op)
            if c is None:
                continue
            if t.op == LEFT and heads[top] == front and t.label != labels[top]:
                c += 1
            elif t.op == RIGHT and heads[front] == top and t.label != labels[front]:
                c += 1
            costs[i] = c
        return costs

    def _sentence_loss(self, sent: Sentence, epoch: int, rng) -> Tensor:
        src_fwd = self._source_forward(sent)
        fwd = self._forward(self._prepare(sent), src_fwd=src_fwd, drop_rng=rng)
        losses = []
        if not self.pipeline:
            for i, tok in enumerate(sent):
                losses.append(softmax_xent(fwd.tag_logits[i], self.upos_index_[tok.upos]))
        heads, labels = gold_arrays(sent)
        config = ParserConfig.initial(len(sent))
        for _ in range(2 * len(sent)):
            if config.is_terminal():
                break
            ops = legal_transitions(config)
            if not ops:
                break
            mask = self._legal_mask(ops)
            logits = self._config_logits(fwd, config, src_fwd=src_fwd, drop_rng=rng)
            scores = logits.value + mask
            pred = int(np.argmax(scores))
            costs = self._transition_costs(config, heads, labels, ops)
            cheapest = costs == costs.min()
            target = int(np.argmax(np.where(cheapest, scores, -np.inf)))
            losses.append(softmax_xent(add(logits, constant(mask)), target))
            if costs[pred] == 0:
                follow = pred
            elif epoch > self.explore_after and rng.random() < self.explore_prob:
                follow = pred
            else:
                follow = target
            config = apply_transition(config, self.transitions_[follow])
        return add_n(losses)

    # ------------------------------------------------------------------
    # inference

    def parse(self, sentence: Sentence) -> Sentence:
        """Greedy transition parse; returns an annotated copy.

        Decoding only considers legal transitions and allows one arc out
        of ROOT, so it terminates within 2n steps; tokens stranded by a
        dead end are attached under the root's child afterwards.  The
        output is deprojectivized and always a valid single-rooted tree.
        """
        check_fitted(self, "net_")
        sent = check_sentences(sentence, require_nonempty=False)[0]
        n = len(sent)
        if n == 0:
            return Sentence(tokens=[], meta=dict(sent.meta))
        if self.pipeline:
            for tok in sent:
                if tok.upos is None:
                    raise DataError(
                        f"token {tok.index}: pipeline parsing needs a POS tag"
                    )
        src_fwd = self._source_forward(sent)
        fwd = self._forward(self._prepare(sent), src_fwd=src_fwd)
        config = ParserConfig.initial(n)
        for _ in range(2 * n):
            if config.is_terminal():
                break
            ops = legal_transitions(config)
            if not ops:
                break
            mask = self._legal_mask(ops)
            if config.stack[-1] == 0 and any(h == 0 for h, _, _ in config.arcs):
                # one arc out of ROOT; Shift stays available
                for i, t in enumerate(self.transitions_):
                    if t.op == RIGHT:
                        mask[i] = ILLEGAL
            logits = self._config_logits(fwd, config, src_fwd=src_fwd)
            choice = int(np.argmax(logits.value + mask))
            config = apply_transition(config, self.transitions_[choice])

        attached: dict[int, tuple[int, str]] = {}
        for h, d, lab in config.arcs:
            attached[d] = (h, lab)
        root_child = min((d for d, (h, _) in attached.items() if h == 0), default=None)
        for i in range(1, n + 1):
            if i in attached:
                continue
            if root_child is None:
                attached[i] = (0, "root")
                root_child = i
            else:
                attached[i] = (root_child, "dep")

        tokens = []
        for i, tok in enumerate(sent):
            head, deprel = attached[tok.index]
            if self.pipeline:
                upos = tok.upos
            else:
                upos = self.upos_tags_[int(np.argmax(fwd.tag_logits[i].value))]
            tokens.append(
                Token(
                    index=tok.index,
                    form=tok.form,
                    norm=tok.norm,
                    lang=tok.lang,
                    upos=upos,
                    head=head,
                    deprel=deprel,
                )
            )
        return deprojectivize(Sentence(tokens=tokens, meta=dict(sent.meta)))

    def tag_only(self, sentence: Sentence) -> list[str]:
        """UPOS tags from the tagger head, without parsing."""
        check_fitted(self, "net_")
        if self.pipeline:
            raise ModelError("pipeline model has no tagger branch")
        sent = check_sentences(sentence, require_nonempty=False)[0]
        if len(sent) == 0:
            return []
        src_fwd = self._source_forward(sent)
        fwd = self._forward(self._prepare(sent), src_fwd=src_fwd)
        return [self.upos_tags_[int(np.argmax(t.value))] for t in fwd.tag_logits]

    def evaluate(self, X) -> EvalReport:
        """Attachment scores of fresh parses against X's own annotation."""
        gold = check_sentences(X)
        pred = [self.parse(self._strip(sent)) for sent in gold]
        return attachment_scores(gold, pred)

    def score(self, X, y=None) -> float:
        return self.evaluate(X).las

    def _strip(self, sent: Sentence) -> Sentence:
        tokens = [
            Token(
                index=t.index,
                form=t.form,
                norm=t.norm,
                lang=t.lang,
                upos=t.upos if self.pipeline else None,
            )
            for t in sent
        ]
        return Sentence(tokens=tokens, meta=dict(sent.meta))

    # ------------------------------------------------------------------
    # persistence

    def save(self, path) -> None:
        check_fitted(self, "net_")
        hyper = {
            "params": self._scalar_params(),
            "word_dim": self.word_dim_,
            "char_vocab": self.char_vocab_,
            "upos_tags": self.upos_tags_,
            "transitions": [[t.op, t.label] for t in self.transitions_],
            "source": None,
        }
        arrays = {f"net.{k}": p.value for k, p in self.net_.named_params()}
        if self.source is not None:
            src = self.source
            hyper["source"] = {
                "params": src._scalar_params(),
                "word_dim": src.word_dim_,
                "char_vocab": src.char_vocab_,
                "upos_tags": src.upos_tags_,
                "transitions": [[t.op, t.label] for t in src.transitions_],
            }
            arrays.update(
                {f"source.{k}": p.value for k, p in src.net_.named_params()}
            )
        save_model(path, "stackprop-parser", hyper, arrays)

    def _scalar_params(self) -> dict:
        skip = {"embeddings", "source"}
        return {k: v for k, v in self.get_params(deep=False).items() if k not in skip}

    @classmethod
    def load(
        cls,
        path,
        embeddings: EmbeddingSpace | None = None,
        source_embeddings: EmbeddingSpace | None = None,
    ) -> "StackPropParser":
        """Rebuild a saved model; embedding spaces are passed back in."""
        hyper, arrays = load_model(path, expect_kind="stackprop-parser")
        source = None
        if hyper.get("source") is not None:
            source = cls._rebuild(
                hyper["source"],
                embeddings=source_embeddings,
                arrays={
                    k[len("source.") :]: v
                    for k, v in arrays.items()
                    if k.startswith("source.")
                },
            )
        model = cls._rebuild(
            hyper,
            embeddings=embeddings,
            arrays={k[len("net.") :]: v for k, v in arrays.items() if k.startswith("net.")},
            source=source,
        )
        return model

    @classmethod
    def _rebuild(cls, hyper: dict, embeddings, arrays, source=None) -> "StackPropParser":
        model = cls(embeddings=embeddings, source=source, **hyper["params"])
        word_dim = hyper["word_dim"]
        if word_dim and embeddings is None:
            raise ModelError(
                f"model was trained with {word_dim}-dim word embeddings; "
                "pass the embedding space"
            )
        if word_dim and embeddings.dim != word_dim:
            raise ModelError(
                f"embedding dim {embeddings.dim} != trained dim {word_dim}"
            )
        if not word_dim and embeddings is not None:
            raise ModelError("model was trained without word embeddings")
        model.word_dim_ = word_dim
        model.char_vocab_ = list(hyper["char_vocab"])
        model.char_index_ = {c: i for i, c in enumerate(model.char_vocab_)}
        model.upos_tags_ = list(hyper["upos_tags"])
        model.upos_index_ = {u: i for i, u in enumerate(model.upos_tags_)}
        model.transitions_ = [
            Transition(op, lab if lab else None) for op, lab in hyper["transitions"]
        ]
        model.net_ = _StackPropNet(
            new_rng(model.seed),
            word_dim=word_dim,
            n_chars=len(model.char_vocab_),
            n_upos=len(model.upos_tags_),
            n_transitions=len(model.transitions_),
            char_dim=model.char_dim,
            char_hidden=model.char_hidden,
            shared_hidden=model.shared_hidden,
            tagger_hidden=model.tagger_hidden,
            tagger_mlp=model.tagger_mlp,
            parser_mlp=model.parser_mlp,
            parser_hidden=model.parser_hidden,
            pos_dim=model.pos_dim,
            pipeline=model.pipeline,
            source_dims=model._source_dims(),
        )
        for name, param in model.net_.named_params():
            if name not in arrays:
                raise ModelError(f"missing parameter {name!r} in model file")
            if arrays[name].shape != param.value.shape:
                raise ModelError(
                    f"parameter {name!r}: shape {arrays[name].shape} != "
                    f"{param.value.shape}"
                )
            param.value[...] = arrays[name]
        return model


def stackprop_train(
    treebank,
    dev=None,
    embeddings: EmbeddingSpace | None = None,
    source: StackPropParser | None = None,
    **hyper,
) -> StackPropParser:
    """Train a joint tagger+parser; pass ``source`` to stack models."""
    model = StackPropParser(embeddings=embeddings, source=source, **hyper)
    return model.fit(treebank, dev=dev)


def parse(model: StackPropParser, sentence: Sentence) -> Sentence:
    return model.parse(sentence)


def tag_only(model: StackPropParser, sentence: Sentence) -> list[str]:
    return model.tag_only(sentence)
