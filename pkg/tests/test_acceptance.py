"""Whole-system checks, one per core guarantee.

Every algorithmic component is compared against an independent oracle
at scale (exhaustive enumeration, brute-force search, hand-computed
values, finite differences), then the bundled toy corpus exercises
training end to end: time budget, accuracy floors, decode-quality
orderings, and byte-level determinism of the CLI.
"""

import math
import time
import warnings

import numpy as np
import pytest

from csparse.cli import main
from csparse.conllu import LangTag, Sentence, Token, read_conllu_file
from csparse.embeddings import BilingualLexicon, EmbeddingSpace, learn_projection
from csparse.langid import load_tagged_corpus
from csparse.lattice import (
    Candidate,
    CandidateLattice,
    three_step_decode,
    viterbi_decode,
    viterbi_decode_indices,
    with_original,
)
from csparse.ngram import BOS, EOS, TrigramLM
from csparse.nn import (
    BiLstm,
    Embedding,
    Lstm,
    LuongAttention,
    Mlp,
    Parameter,
    concat,
    constant,
    dot,
    orthonormal_init,
    softmax_xent,
)
from csparse.parser import (
    StackPropParser,
    apply_transition,
    arcs_to_heads,
    deprojectivize,
    dynamic_oracle_costs,
    gold_arrays,
    legal_transitions,
    oracle_sequence,
    projectivize,
    run_transitions,
)
from csparse.parser import ParserConfig
from csparse.pipeline import AnnotationPipeline, PipelineConfig, evaluate

from .helpers import (
    all_projective_trees,
    finite_difference_check,
    is_projective_by_crossing,
    random_projective_tree,
    random_tree,
    sentence_from_heads,
)
from .test_lattice import brute_force_indices, make_lm, three_step_reference
from .test_ngram import HAND_CORPUS, HAND_VALUES
from .test_parser_model import SMALL, TINY, toy_treebank
from .test_parser_system import brute_force_gain, matched_count, reachable_configs


def test_transition_sequences_rebuild_every_tree():
    started = time.monotonic()
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        for heads in all_projective_trees(n):
            sent = sentence_from_heads(heads, rng)
            final = run_transitions(n, oracle_sequence(sent))
            got_h, got_l = arcs_to_heads(final, n)
            gold_h, gold_l = gold_arrays(sent)
            assert got_h[1:] == gold_h[1:] and got_l[1:] == gold_l[1:]
    for _ in range(1000):
        n = int(rng.integers(1, 41))
        sent = sentence_from_heads(random_projective_tree(n, rng), rng)
        final = run_transitions(n, oracle_sequence(sent))
        got_h, got_l = arcs_to_heads(final, n)
        gold_h, gold_l = gold_arrays(sent)
        assert got_h[1:] == gold_h[1:] and got_l[1:] == gold_l[1:]
    assert time.monotonic() - started < 30.0


def test_transition_costs_match_exhaustive_search():
    for heads0 in all_projective_trees(5):
        sent = sentence_from_heads(heads0, np.random.default_rng(5))
        heads, labels = gold_arrays(sent)
        memo = {}
        for config in reachable_configs(5, heads, labels):
            v_here = matched_count(config, heads, labels) + brute_force_gain(
                config, heads, labels, memo
            )
            for t, cost in dynamic_oracle_costs(config, sent).items():
                after = apply_transition(config, t)
                v_after = matched_count(after, heads, labels) + brute_force_gain(
                    after, heads, labels, memo
                )
                assert cost == v_here - v_after


def _descendants(heads, root):
    kids = {}
    for d, h in enumerate(heads, start=1):
        kids.setdefault(h, []).append(d)
    out, frontier = set(), [root]
    while frontier:
        node = frontier.pop()
        for k in kids.get(node, []):
            if k not in out:
                out.add(k)
                frontier.append(k)
    return out


def _nonprojective_arcs(heads):
    """Arcs with a token in their span that the head does not dominate."""
    bad = []
    for d, h in enumerate(heads, start=1):
        lo, hi = min(h, d), max(h, d)
        dom = _descendants(heads, h) | {h}
        if any(k not in dom for k in range(lo + 1, hi)):
            bad.append((h, d))
    return bad


def test_projectivized_output_and_single_lift_recovery():
    rng = np.random.default_rng(41)
    singles = 0
    for _ in range(1000):
        n = int(rng.integers(1, 13))
        heads = random_tree(n, rng)
        sent = sentence_from_heads(heads, rng)
        proj = projectivize(sent)
        assert is_projective_by_crossing([t.head for t in proj])
        if len(_nonprojective_arcs(heads)) == 1:
            singles += 1
            back = deprojectivize(proj)
            assert [t.head for t in back] == heads
            assert [t.deprel for t in back] == [t.deprel for t in sent]
    # the suite must actually contain a healthy number of single-lift trees
    assert singles >= 100


def test_lattice_decoding_matches_enumeration():
    rng = np.random.default_rng(9)
    vocab = ["x", "y", "z", "w", "qqq"]
    corpus = [
        [vocab[int(k)] for k in rng.integers(0, len(vocab), size=rng.integers(1, 7))]
        for _ in range(60)
    ]
    lm = TrigramLM().fit(corpus)
    started = time.monotonic()
    for trial in range(200):
        n = int(rng.integers(1, 9))
        positions, size = [], 1
        for _ in range(n):
            b = min(int(rng.integers(1, 6)), max(1, 5000 // size))
            size *= b
            positions.append(
                [Candidate(vocab[int(rng.integers(0, len(vocab)))]) for _ in range(b)]
            )
        assert size <= 5000
        lat = CandidateLattice(positions)
        assert viterbi_decode_indices(lat, lm) == brute_force_indices(lat, lm), (
            f"lattice {trial}"
        )
    assert time.monotonic() - started < 10.0


def test_translation_context_decoding_matches_reference():
    lm_en = make_lm(
        ["please call me now"] * 20
        + ["friends call me daily"] * 10
        + ["what is my friend doing"] * 10
    )
    lm_hi = make_lm(
        ["yaar kya kar rahe ho"] * 20
        + ["mera yaar aa raha hai"] * 10
        + ["kya baat hai yaar"] * 10
    )
    lex = BilingualLexicon()
    for src, tgt in [
        ("yaar", "friend"), ("yaar", "buddy"), ("kya", "what"), ("mera", "my"),
        ("baat", "talk"), ("hai", "is"),
    ]:
        lex.add(src, tgt)

    rng = np.random.default_rng(31)
    en_vocab = ["please", "call", "me", "now", "friend", "what", "my"]
    hi_vocab = ["yaar", "kya", "kar", "mera", "baat", "hai"]
    for trial in range(40):
        n = int(rng.integers(2, 5))
        words, tags, hi_cands, en_cands = [], [], [], []
        for _ in range(n):
            tag = [LangTag.HI, LangTag.EN, LangTag.UNIV][int(rng.integers(0, 3))]
            tags.append(tag)
            words.append(f"s{int(rng.integers(0, 100))}")
            pool, cands = (
                (hi_vocab, hi_cands) if tag == LangTag.HI else (en_vocab, en_cands)
            )
            if tag == LangTag.UNIV:
                hi_cands.append([])
                en_cands.append([])
                continue
            k = int(rng.integers(1, 4))
            cands.append(
                [
                    Candidate(pool[int(rng.integers(0, len(pool)))], -float(j))
                    for j in range(k)
                ]
            )
            (en_cands if tag == LangTag.HI else hi_cands).append([])
        out = three_step_decode(words, tags, hi_cands, en_cands, lex, lm_en, lm_hi)
        ref = three_step_reference(words, tags, hi_cands, en_cands, lex, lm_en, lm_hi)
        assert out == ref, f"instance {trial}"

    # on one-language input the pipeline must collapse to plain lattice search
    en_words = ["plz", "cl", "me"]
    en_cands = [
        [Candidate("please", -0.1), Candidate("plaza", -2.0)],
        [Candidate("call", -0.1), Candidate("cool", -1.0)],
        [Candidate("me", -0.1)],
    ]
    out = three_step_decode(
        en_words, [LangTag.EN] * 3, [[], [], []], en_cands, lex, lm_en, lm_hi
    )
    direct = viterbi_decode(
        CandidateLattice([with_original(c, w) for c, w in zip(en_cands, en_words)]),
        lm_en,
    )
    assert out == direct

    hi_words = ["yr", "ky"]
    hi_cands = [
        [Candidate("yaar", -0.2), Candidate("yara", -1.5)],
        [Candidate("kya", -0.3), Candidate("kyu", -0.9)],
    ]
    out = three_step_decode(
        hi_words, [LangTag.HI] * 2, hi_cands, [[], []], lex, lm_en, lm_hi
    )
    direct = viterbi_decode(
        CandidateLattice([with_original(c, w) for c, w in zip(hi_cands, hi_words)]),
        lm_hi,
    )
    assert out == direct


def test_lm_distributions_normalize_and_match_hand_values():
    rng = np.random.default_rng(13)
    vocab = [f"w{i}" for i in range(8)]
    corpus = [
        [vocab[int(k)] for k in rng.integers(0, 8, size=rng.integers(1, 7))]
        for _ in range(60)
    ]
    lm = TrigramLM().fit(corpus)
    pool = vocab + [BOS, EOS, "zzz-unseen"]
    for _ in range(1000):
        u = pool[int(rng.integers(0, len(pool)))]
        v = pool[int(rng.integers(0, len(pool)))]
        total = sum(math.exp(lm.cond_logp(u, v, w)) for w in lm.vocab_)
        assert abs(total - 1.0) < 1e-6, f"history ({u}, {v})"

    hand = TrigramLM().fit(HAND_CORPUS)
    for (w, u, v), expected in HAND_VALUES.items():
        assert hand.cond_logp(u, v, w) == pytest.approx(expected, abs=1e-9), (
            f"P({w}|{u} {v})"
        )


def test_projection_recovers_planted_rotation():
    rng = np.random.default_rng(2)
    words = [f"w{i}" for i in range(40)]
    dim = 8
    lex = BilingualLexicon()
    for w in words:
        lex.add(w, w)
    X = rng.standard_normal((len(words), dim))
    Xn = X / np.linalg.norm(X, axis=1, keepdims=True)
    R = orthonormal_init(dim, dim, 3)
    W = learn_projection(
        EmbeddingSpace(words, Xn), EmbeddingSpace(words, Xn @ R), lex
    )
    assert np.max(np.abs(W - R)) < 1e-6
    assert np.max(np.abs(W.T @ W - np.eye(dim))) < 1e-6

    # orthogonality cannot depend on the spaces actually being related
    src = EmbeddingSpace(words, rng.standard_normal((len(words), dim)))
    tgt = EmbeddingSpace(words, rng.standard_normal((len(words), dim)))
    W2 = learn_projection(src, tgt, lex)
    assert np.max(np.abs(W2.T @ W2 - np.eye(dim))) < 1e-6


def test_every_layer_passes_gradient_checks():
    rng = np.random.default_rng(77)

    def probe(vec):
        return dot(vec, constant(np.ones(vec.value.shape[0])))

    emb = Embedding(4, 3, np.random.default_rng(1))
    target = constant(rng.standard_normal(6))
    finite_difference_check(
        lambda: dot(concat([emb(0), emb(3)]), target), [emb.table]
    )

    lstm = Lstm(2, 3, np.random.default_rng(5))
    xs = [constant(v) for v in rng.standard_normal((2, 2))]
    finite_difference_check(lambda: probe(concat(lstm.run(xs))), lstm.params())

    bi = BiLstm(2, 2, np.random.default_rng(2))
    ys = [constant(v) for v in rng.standard_normal((3, 2))]
    finite_difference_check(lambda: probe(concat(bi.encode(ys))), bi.params())

    mlp = Mlp([3, 5, 4], np.random.default_rng(3))
    x = Parameter(rng.standard_normal(3))
    finite_difference_check(lambda: softmax_xent(mlp(x), 1), mlp.params() + [x])

    att = LuongAttention(3, 4, np.random.default_rng(2))
    query = Parameter(rng.standard_normal(3))
    memory = Parameter(rng.standard_normal((4, 4)))

    def att_loss():
        context, _ = att(query, memory)
        return probe(context)

    finite_difference_check(att_loss, [att.w_score, query, memory])

    # gradients must also flow through the bridge matrices into the source net
    bank = toy_treebank()
    source = StackPropParser(epochs=1, seed=6, **TINY).fit(bank)
    model = StackPropParser(epochs=0, seed=0, source=source, **TINY).fit(bank[:2])
    net, src = model.net_, source.net_
    params = [
        net.w_src_tag, net.w_src_parser_in, net.w_src_parser_mlp,
        src.w_tag1, src.w_par1, src.shared.fwd.w_in, src.char_emb.table,
    ]
    finite_difference_check(
        lambda: model._sentence_loss(bank[0], epoch=1, rng=np.random.default_rng(0)),
        params,
    )


def test_masked_stacking_reproduces_plain_forward():
    bank = toy_treebank()
    source = StackPropParser(epochs=1, seed=7, **SMALL).fit(bank)
    plain = StackPropParser(epochs=0, seed=3, **SMALL).fit(bank)
    stacked = StackPropParser(epochs=0, seed=3, source=source, **SMALL).fit(bank)
    for name in ("w_src_tag", "w_src_parser_in", "w_src_parser_mlp"):
        getattr(stacked.net_, name).value[...] = 0.0
    rng = np.random.default_rng(0)
    alphabet = list("abcdefghijklmnopqrstuvwxyz")
    for _ in range(100):
        n = int(rng.integers(1, 8))
        words = [
            "".join(rng.choice(alphabet, size=rng.integers(1, 6))) for _ in range(n)
        ]
        sent = Sentence(
            tokens=[Token(index=i + 1, form=w) for i, w in enumerate(words)]
        )
        fp = plain._forward(plain._prepare(sent))
        src_fwd = stacked._source_forward(sent)
        fs = stacked._forward(stacked._prepare(sent), src_fwd=src_fwd)
        for a, b in zip(fp.tag_logits, fs.tag_logits):
            assert np.array_equal(a.value, b.value)
        config = ParserConfig.initial(n)
        while not config.is_terminal():
            ops = legal_transitions(config)
            if not ops:
                break
            la = plain._config_logits(fp, config)
            lb = stacked._config_logits(fs, config, src_fwd=src_fwd)
            assert np.array_equal(la.value, lb.value)
            config = apply_transition(
                config,
                plain.transitions_[int(np.argmax(la.value + plain._legal_mask(ops)))],
            )


def _read_pairs(path):
    return [
        tuple(line.split("\t"))
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]


def test_toy_training_memorizes_within_budget(toy_models):
    assert toy_models["train_seconds"] < 600.0

    pipe = AnnotationPipeline.from_config(
        PipelineConfig.from_json(toy_models["config"])
    )
    tagged = load_tagged_corpus(toy_models["langid_tsv"])
    predicted = pipe.langid.predict(tagged)
    total = sum(len(s) for s in tagged)
    hits = sum(
        p == tok.lang
        for sent, tags in zip(tagged, predicted)
        for tok, p in zip(sent, tags)
    )
    assert 100.0 * hits / total >= 99.0

    for key, model in (("hi", pipe.hi_normalizer), ("en", pipe.en_normalizer)):
        pairs = _read_pairs(toy_models["data"] / f"{key}_pairs.tsv")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            good = sum(model.candidates(noisy).best == clean for noisy, clean in pairs)
        assert 100.0 * good / len(pairs) >= 95.0, key

    bank = read_conllu_file(toy_models["treebank"])
    assert pipe.parser.evaluate(bank).uas >= 90.0


def test_context_decoding_and_gold_inputs_never_hurt(toy_models):
    pipe = AnnotationPipeline.from_config(
        PipelineConfig.from_json(toy_models["config"])
    )
    bank = read_conllu_file(toy_models["treebank"])

    def decode_accuracy(mode):
        pipe.decode_mode = mode
        hits = total = 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            for gold in bank:
                out = pipe.front_end(gold, gold_lid=True)
                for got, tok in zip(out.decoded, gold):
                    hits += got == tok.best_form
                    total += 1
        return 100.0 * hits / total

    contextual = decode_accuracy("3-step")
    greedy = decode_accuracy("first-best")
    assert contextual >= greedy

    pipe.decode_mode = "3-step"
    started = time.monotonic()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reports = evaluate(pipe, bank)
    assert time.monotonic() - started < 60.0
    assert (
        reports["gold-lid+gold-trn"].las >= reports["auto-lid+auto-trn"].las
    )


def test_seeded_runs_are_byte_identical(toy_models, tmp_path):
    outputs = []
    for name in ("first.conllu", "second.conllu"):
        out = tmp_path / name
        code = main([
            "run", str(toy_models["text"]), "-c", str(toy_models["config"]),
            "--seed", "0", "-o", str(out),
        ])
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert outputs[0]
