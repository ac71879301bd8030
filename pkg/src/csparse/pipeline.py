"""End-to-end orchestration: raw tokens to parsed CoNLL-U.

The stages run in a fixed order: language identification, per-token
candidate generation, sentence-level decoding, parsing.  A
:class:`PipelineConfig` names the resource and model files; an
:class:`AnnotationPipeline` holds the loaded models and is safe to
share across worker processes because nothing mutates after loading.

Any stage failure is re-raised with the stage name prefixed so batch
runs never emit partially annotated output.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .conllu import LangTag, Sentence, Token, validate_tree
from .embeddings import (
    BilingualLexicon,
    EmbeddingSpace,
    load_embeddings,
    load_lexicon,
)
from .errors import DataError
from .langid import LangIdResources, LanguageIdentifier
from .lattice import Candidate, fragment_decode, three_step_decode
from .metrics import EvalReport, attachment_scores
from .ngram import TrigramLM
from .normalizer import CandidateSet, CharacterNormalizer, normalize_candidates
from .parser import StackPropParser

DECODE_MODES = ("first-best", "fragment", "3-step")
PARSE_MODES = ("stackprop", "pipeline")

#: Environment variables named CSPARSE_<FIELD> override config fields.
ENV_PREFIX = "CSPARSE_"

SCHEMA_VERSION = 1

_PATH_FIELDS = (
    "en_embeddings",
    "hi_embeddings",
    "lexicon",
    "wordlist",
    "lm_en",
    "lm_hi",
    "langid_model",
    "hi_normalizer",
    "en_normalizer",
    "parser_model",
    "tagger_model",
    "source_parser",
    "projection",
)


@dataclass
class PipelineConfig:
    """File locations plus the knobs that select an experimental condition.

    Path fields may stay None; stages without their model degrade to
    pass-through (normalization) or fail with a clear message when the
    stage cannot run at all (tagging, parsing).
    """

    schema_version: int = SCHEMA_VERSION
    en_embeddings: str | None = None
    hi_embeddings: str | None = None
    lexicon: str | None = None
    wordlist: str | None = None
    lm_en: str | None = None
    lm_hi: str | None = None
    langid_model: str | None = None
    hi_normalizer: str | None = None
    en_normalizer: str | None = None
    parser_model: str | None = None
    tagger_model: str | None = None
    source_parser: str | None = None
    projection: str | None = None
    beam_width: int = 5
    use_crosslingual: bool = True
    decode_mode: str = "3-step"
    parse_mode: str = "stackprop"
    stacking: bool = False
    workers: int = 1
    seed: int = 0

    def validate(self, check_files: bool = True) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise DataError(
                f"config schema version {self.schema_version} not supported "
                f"(expected {SCHEMA_VERSION})"
            )
        if self.beam_width < 1:
            raise DataError(f"beam width must be >= 1, got {self.beam_width}")
        if self.workers < 1:
            raise DataError(f"workers must be >= 1, got {self.workers}")
        if self.decode_mode not in DECODE_MODES:
            raise DataError(
                f"unknown decode mode {self.decode_mode!r}; "
                f"choose from {', '.join(DECODE_MODES)}"
            )
        if self.parse_mode not in PARSE_MODES:
            raise DataError(
                f"unknown parse mode {self.parse_mode!r}; "
                f"choose from {', '.join(PARSE_MODES)}"
            )
        if check_files:
            for name in _PATH_FIELDS:
                value = getattr(self, name)
                if value is not None and not Path(value).exists():
                    raise DataError(f"{name}: no such file {value}")

    @classmethod
    def from_json(cls, path, env: dict | None = None) -> "PipelineConfig":
        """Load a config file; relative paths resolve against its directory.

        ``env`` entries named CSPARSE_<FIELD> (upper-case field name)
        override file values; booleans accept on/off, true/false, 1/0.
        """
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise DataError(f"config {path} must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise DataError(f"config {path}: unknown fields {', '.join(unknown)}")
        if env is not None:
            for name in known:
                value = env.get(ENV_PREFIX + name.upper())
                if value is not None:
                    raw[name] = value
        cfg = cls()
        for name, value in raw.items():
            setattr(cfg, name, _coerce(name, value, getattr(cfg, name)))
        for name in _PATH_FIELDS:
            value = getattr(cfg, name)
            if value is not None:
                setattr(cfg, name, str((path.parent / value).resolve()))
        cfg.validate()
        return cfg


def _coerce(name: str, value, default):
    """Config values arrive as JSON types or env strings; settle the type."""
    if value is None or name in _PATH_FIELDS:
        return None if value is None else str(value)
    want = type(default)
    if isinstance(value, str) and want is not str:
        text = value.strip().lower()
        if want is bool:
            if text in ("1", "true", "on", "yes"):
                return True
            if text in ("0", "false", "off", "no"):
                return False
            raise DataError(f"{name}: cannot read {value!r} as a flag")
        try:
            return want(value)
        except ValueError:
            raise DataError(f"{name}: cannot read {value!r} as {want.__name__}") from None
    if want is bool and not isinstance(value, bool):
        raise DataError(f"{name}: expected a flag, got {value!r}")
    if want is int and isinstance(value, bool):
        raise DataError(f"{name}: expected a number, got {value!r}")
    if not isinstance(value, want):
        raise DataError(f"{name}: expected {want.__name__}, got {value!r}")
    return value


def load_projection(path) -> np.ndarray:
    """Square projection matrix from a .npy file."""
    try:
        w = np.load(str(path))
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read projection {path}: {exc}") from None
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise DataError(f"projection must be square, got shape {w.shape}")
    return w


def merge_spaces(
    primary: EmbeddingSpace | None,
    secondary: EmbeddingSpace | None,
    projection: np.ndarray | None = None,
) -> EmbeddingSpace | None:
    """One lookup table over both vocabularies for the parser.

    Secondary rows are mapped through ``projection`` when given; on a
    vocabulary collision the primary row wins.  Either space may be
    None, in which case the other passes through unchanged (projection
    still applies to a lone secondary space).
    """
    if primary is None and secondary is None:
        return None
    words: list[str] = []
    rows: list[np.ndarray] = []
    if primary is not None:
        words.extend(primary.words)
        rows.extend(primary.matrix[: len(primary.words)])
    if secondary is not None:
        if primary is not None and primary.dim != secondary.dim:
            raise DataError(
                f"dim mismatch: {primary.dim} vs {secondary.dim}"
            )
        seen = set(words)
        for i, word in enumerate(secondary.words):
            if word in seen:
                continue
            vec = secondary.matrix[i]
            if projection is not None:
                vec = vec @ projection
            words.append(word)
            rows.append(vec)
    return EmbeddingSpace(words, np.stack(rows))


@dataclass
class PipelineOutput:
    """Final annotation plus every stage's intermediate output.

    All per-token lists are aligned with the input; ``sentence`` always
    passes :func:`validate_tree`.
    """

    sentence: Sentence
    tags: list[LangTag]
    candidates: list[CandidateSet]
    decoded: list[str]

    def to_json(self) -> str:
        """One compact JSON object per sentence, for trace files."""
        payload = {
            "forms": [t.form for t in self.sentence],
            "tags": [str(t) for t in self.tags],
            "candidates": [
                [{"word": w, "score": s} for w, s in cs.candidates]
                for cs in self.candidates
            ],
            "decoded": list(self.decoded),
            "upos": [t.upos for t in self.sentence],
            "heads": [t.head for t in self.sentence],
            "deprels": [t.deprel for t in self.sentence],
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True)


@contextmanager
def _stage(name: str):
    # one prefix per failure even when stages nest through helpers
    try:
        yield
    except DataError as err:
        if str(err).startswith(name + ":"):
            raise
        raise type(err)(f"{name}: {err}") from err


class AnnotationPipeline:
    """Loaded models wired together in paper order.

    Construct directly for tests or via :meth:`from_config`; every
    component is optional so partial pipelines (tagging only, no
    normalizers) still run as far as they can.
    """

    def __init__(
        self,
        langid: LanguageIdentifier | None = None,
        hi_normalizer: CharacterNormalizer | None = None,
        en_normalizer: CharacterNormalizer | None = None,
        lm_en: TrigramLM | None = None,
        lm_hi: TrigramLM | None = None,
        lexicon: BilingualLexicon | None = None,
        parser: StackPropParser | None = None,
        tagger: StackPropParser | None = None,
        beam_width: int = 5,
        decode_mode: str = "3-step",
        parse_mode: str = "stackprop",
    ):
        if decode_mode not in DECODE_MODES:
            raise DataError(f"unknown decode mode {decode_mode!r}")
        if parse_mode not in PARSE_MODES:
            raise DataError(f"unknown parse mode {parse_mode!r}")
        self.langid = langid
        self.hi_normalizer = hi_normalizer
        self.en_normalizer = en_normalizer
        self.lm_en = lm_en
        self.lm_hi = lm_hi
        self.lexicon = lexicon
        self.parser = parser
        self.tagger = tagger
        self.beam_width = beam_width
        self.decode_mode = decode_mode
        self.parse_mode = parse_mode

    @classmethod
    def from_config(cls, cfg: PipelineConfig) -> "AnnotationPipeline":
        cfg.validate()
        en_space = load_embeddings(cfg.en_embeddings) if cfg.en_embeddings else None
        hi_space = load_embeddings(cfg.hi_embeddings) if cfg.hi_embeddings else None
        projection = None
        if cfg.projection:
            projection = load_projection(cfg.projection)
        if (
            cfg.use_crosslingual
            and projection is None
            and en_space is not None
            and hi_space is not None
        ):
            raise DataError(
                "use_crosslingual is on but no projection matrix is configured"
            )
        if not cfg.use_crosslingual:
            projection = None
        space = merge_spaces(en_space, hi_space, projection)

        hi_norm = (
            CharacterNormalizer.load(cfg.hi_normalizer) if cfg.hi_normalizer else None
        )
        en_norm = (
            CharacterNormalizer.load(cfg.en_normalizer) if cfg.en_normalizer else None
        )
        lexicon = load_lexicon(cfg.lexicon) if cfg.lexicon else None
        lm_en = TrigramLM.from_arpa(cfg.lm_en) if cfg.lm_en else None
        lm_hi = TrigramLM.from_arpa(cfg.lm_hi) if cfg.lm_hi else None
        if cfg.decode_mode == "3-step":
            missing = [
                name
                for name, value in (
                    ("lexicon", lexicon),
                    ("lm_en", lm_en),
                    ("lm_hi", lm_hi),
                )
                if value is None
            ]
            if missing:
                raise DataError(
                    f"3-step decoding needs {', '.join(missing)} in the config"
                )

        langid = None
        if cfg.langid_model:
            resources = LangIdResources(
                en_space=en_space,
                hi_space=hi_space,
                dictionary=_load_wordlist(cfg.wordlist),
                transliterator=hi_norm,
                projection=projection,
            )
            langid = LanguageIdentifier.load(cfg.langid_model, resources=resources)

        parser = None
        if cfg.parser_model:
            parser = StackPropParser.load(
                cfg.parser_model, embeddings=space, source_embeddings=space
            )
        tagger = None
        if cfg.tagger_model:
            tagger = StackPropParser.load(
                cfg.tagger_model, embeddings=space, source_embeddings=space
            )
        if cfg.parse_mode == "pipeline" and tagger is None:
            raise DataError("parse_mode=pipeline needs a tagger_model in the config")

        return cls(
            langid=langid,
            hi_normalizer=hi_norm,
            en_normalizer=en_norm,
            lm_en=lm_en,
            lm_hi=lm_hi,
            lexicon=lexicon,
            parser=parser,
            tagger=tagger,
            beam_width=cfg.beam_width,
            decode_mode=cfg.decode_mode,
            parse_mode=cfg.parse_mode,
        )

    # ------------------------------------------------------------------
    # stages

    def identify(self, sentence: Sentence) -> list[LangTag]:
        with _stage("language identification"):
            if self.langid is None:
                raise DataError("no language identification model is configured")
            return self.langid.predict([sentence])[0]

    def gen_candidates(
        self, sentence: Sentence, tags: list[LangTag]
    ) -> list[CandidateSet]:
        """Own-language candidates per token; bypass tags pass through."""
        with _stage("normalization"):
            out = []
            for tok, tag in zip(sentence, tags):
                model = {
                    LangTag.HI: self.hi_normalizer,
                    LangTag.EN: self.en_normalizer,
                }.get(tag)
                out.append(
                    normalize_candidates(model, tok.form, tag, b=self.beam_width)
                )
            return out

    def decode(
        self,
        sentence: Sentence,
        tags: list[LangTag],
        candidates: list[CandidateSet],
    ) -> list[str]:
        with _stage("decoding"):
            words = sentence.forms()
            cand_lists = [
                [Candidate(w, s) for w, s in cs.candidates] for cs in candidates
            ]
            if self.decode_mode == "first-best":
                return [cs.best for cs in candidates]
            if self.decode_mode == "fragment":
                lms = {}
                if self.lm_hi is not None:
                    lms[LangTag.HI] = self.lm_hi
                if self.lm_en is not None:
                    lms[LangTag.EN] = self.lm_en
                return fragment_decode(words, tags, cand_lists, lms)
            if self.lexicon is None:
                raise DataError("3-step decoding needs a bilingual lexicon")
            passthrough = [[Candidate(w)] for w in words]
            hi_cands = [
                cand_lists[i] if tag == LangTag.HI else passthrough[i]
                for i, tag in enumerate(tags)
            ]
            en_cands = [
                cand_lists[i] if tag == LangTag.EN else passthrough[i]
                for i, tag in enumerate(tags)
            ]
            return three_step_decode(
                words, tags, hi_cands, en_cands, self.lexicon, self.lm_en, self.lm_hi
            )

    def parse(self, sentence: Sentence) -> Sentence:
        with _stage("parsing"):
            if self.parser is None:
                raise DataError("no parser model is configured")
            work = sentence
            if self.parse_mode == "pipeline":
                if self.tagger is None:
                    raise DataError("parse_mode=pipeline needs a tagger model")
                upos = self.tagger.tag_only(work)
                work = _copy_sentence(work)
                for tok, tag in zip(work, upos):
                    tok.upos = tag
            return self.parser.parse(work)

    # ------------------------------------------------------------------
    # end to end

    def front_end(
        self, sentence, gold_lid: bool = False, gold_trn: bool = False
    ) -> PipelineOutput:
        """Language ID, candidate generation, and decoding; no parse yet.

        The returned sentence carries ``lang`` tags and ``norm`` forms
        but no tree.  ``gold_lid``/``gold_trn`` substitute the input's
        own ``lang`` tags / ``norm`` forms for the corresponding stage,
        which is how the gold-input ablations are expressed.
        """
        sentence = _as_sentence(sentence)
        work = _copy_sentence(sentence)
        if len(sentence) == 0:
            return PipelineOutput(sentence=work, tags=[], candidates=[], decoded=[])

        if gold_lid:
            with _stage("language identification"):
                missing = [t.index for t in sentence if t.lang is None]
                if missing:
                    raise DataError(
                        f"gold language tags requested but token(s) "
                        f"{missing} carry none"
                    )
                tags = [t.lang for t in sentence]
        else:
            tags = self.identify(sentence)
        for tok, tag in zip(work, tags):
            tok.lang = tag

        if gold_trn:
            candidates = [
                CandidateSet(word=t.form, candidates=((t.best_form, 0.0),))
                for t in sentence
            ]
            decoded = [t.best_form for t in sentence]
        else:
            candidates = self.gen_candidates(work, tags)
            decoded = self.decode(work, tags, candidates)
        for tok, word in zip(work, decoded):
            tok.norm = word if word != tok.form else None

        return PipelineOutput(
            sentence=work, tags=tags, candidates=candidates, decoded=decoded
        )

    def annotate(
        self, sentence, gold_lid: bool = False, gold_trn: bool = False
    ) -> PipelineOutput:
        """Run every stage on one sentence and keep the intermediates."""
        out = self.front_end(sentence, gold_lid=gold_lid, gold_trn=gold_trn)
        if len(out.sentence) == 0:
            return out
        parsed = self.parse(out.sentence)
        return PipelineOutput(
            sentence=parsed,
            tags=out.tags,
            candidates=out.candidates,
            decoded=out.decoded,
        )


def _load_wordlist(path) -> frozenset:
    if not path:
        return frozenset()
    with open(str(path), encoding="utf-8") as fh:
        return frozenset(
            line.strip().lower() for line in fh if line.strip()
        )


def _as_sentence(raw) -> Sentence:
    if isinstance(raw, Sentence):
        return raw
    tokens = [Token(index=i + 1, form=str(w)) for i, w in enumerate(raw)]
    return Sentence(tokens=tokens)


def _copy_sentence(sentence: Sentence) -> Sentence:
    return Sentence(
        tokens=[replace(tok) for tok in sentence], meta=dict(sentence.meta)
    )


def run_pipeline(pipeline, raw) -> PipelineOutput:
    """Annotate one tokenized sentence; loads models first when handed a config."""
    if isinstance(pipeline, PipelineConfig):
        pipeline = AnnotationPipeline.from_config(pipeline)
    return pipeline.annotate(raw)


# ----------------------------------------------------------------------
# batch runs

_WORKER_PIPELINE: AnnotationPipeline | None = None


def _init_worker(pipeline):
    global _WORKER_PIPELINE
    _WORKER_PIPELINE = pipeline


def _annotate_at(args):
    index, sentence, gold_lid, gold_trn = args
    out = _WORKER_PIPELINE.annotate(sentence, gold_lid=gold_lid, gold_trn=gold_trn)
    return index, out


def annotate_corpus(
    pipeline: AnnotationPipeline,
    sentences,
    workers: int = 1,
    gold_lid: bool = False,
    gold_trn: bool = False,
) -> list[PipelineOutput]:
    """All sentences in input order, optionally across worker processes.

    Models are read-only after loading, so workers share them safely;
    results are reordered by input index, making output independent of
    worker count.
    """
    sentences = [_as_sentence(s) for s in sentences]
    if workers <= 1 or len(sentences) <= 1:
        return [
            pipeline.annotate(s, gold_lid=gold_lid, gold_trn=gold_trn)
            for s in sentences
        ]
    jobs = [(i, s, gold_lid, gold_trn) for i, s in enumerate(sentences)]
    results: list[PipelineOutput | None] = [None] * len(sentences)
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(pipeline,)
    ) as pool:
        for index, out in pool.map(_annotate_at, jobs):
            results[index] = out
    return results


# ----------------------------------------------------------------------
# evaluation

#: (label, gold_lid, gold_trn) for the 2x2 gold/auto input grid.
EVAL_CONDITIONS = (
    ("gold-lid+gold-trn", True, True),
    ("gold-lid+auto-trn", True, False),
    ("auto-lid+gold-trn", False, True),
    ("auto-lid+auto-trn", False, False),
)


def evaluate(
    pipeline: AnnotationPipeline,
    gold: list[Sentence],
    conditions=None,
    workers: int = 1,
) -> dict[str, EvalReport]:
    """Attachment scores under each gold/auto input condition.

    ``conditions`` narrows the run to a subset of condition labels;
    the full grid is the default.
    """
    if isinstance(pipeline, PipelineConfig):
        workers = pipeline.workers
        pipeline = AnnotationPipeline.from_config(pipeline)
    wanted = set(conditions) if conditions is not None else None
    if wanted is not None:
        known = {label for label, _, _ in EVAL_CONDITIONS}
        bad = sorted(wanted - known)
        if bad:
            raise DataError(f"unknown evaluation condition(s): {', '.join(bad)}")
    gold = list(gold)
    for sent in gold:
        problems = validate_tree(sent)
        if problems:
            raise DataError(
                "gold corpus is not fully parsed: " + "; ".join(problems)
            )
    reports: dict[str, EvalReport] = {}
    for label, gold_lid, gold_trn in EVAL_CONDITIONS:
        if wanted is not None and label not in wanted:
            continue
        outputs = annotate_corpus(
            pipeline, gold, workers=workers, gold_lid=gold_lid, gold_trn=gold_trn
        )
        reports[label] = attachment_scores(gold, [o.sentence for o in outputs])
    return reports
