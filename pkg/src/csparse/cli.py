"""Command-line surface.

One ``csparse`` command with subcommands for each stage, each training
entry point, and the end-to-end run.  Input text is pre-tokenized, one
sentence per line, space-separated; ``-`` means stdin.  Exit codes: 0
success, 1 usage error, 2 data/model error.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from .conllu import Sentence, Token, read_conllu_file, write_conllu
from .embeddings import learn_projection, load_embeddings, load_lexicon
from .errors import DataError
from .langid import LangIdResources, LanguageIdentifier, load_tagged_corpus
from .ngram import TrigramLM
from .normalizer import CharacterNormalizer, NoiseRuleSet, gen_synthetic_pairs
from .parser import StackPropParser, projectivize
from .pipeline import (
    DECODE_MODES,
    EVAL_CONDITIONS,
    PARSE_MODES,
    AnnotationPipeline,
    PipelineConfig,
    annotate_corpus,
    evaluate,
    load_projection,
    merge_spaces,
)

CONDITION_LABELS = tuple(label for label, _, _ in EVAL_CONDITIONS)


def _load_config(path) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return PipelineConfig.from_json(path, env=os.environ)


def _override(cfg: PipelineConfig, **changes) -> PipelineConfig:
    """Apply non-None flag values on top of the config file."""
    actual = {k: v for k, v in changes.items() if v is not None}
    if not actual:
        return cfg
    cfg = replace(cfg, **actual)
    cfg.validate(check_files=False)
    return cfg


def _read_lines(path) -> list[str]:
    if str(path) == "-":
        return sys.stdin.read().splitlines()
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def _read_sentences(path) -> list[Sentence]:
    """Tokenized text, one sentence per line; blank lines are skipped."""
    out = []
    for line in _read_lines(path):
        words = line.split()
        if not words:
            continue
        out.append(
            Sentence(tokens=[Token(index=i + 1, form=w) for i, w in enumerate(words)])
        )
    return out


def _write_text(path, text: str) -> None:
    if path is None:
        click.echo(text, nl=False)
    else:
        Path(path).write_text(text, encoding="utf-8", newline="\n")


def _lines_out(lines: list[str]) -> str:
    return "\n".join(lines) + ("\n" if lines else "")


def _read_pairs(path) -> list[tuple[str, str]]:
    pairs = []
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise DataError(
                f"{path}: line {lineno}: expected noisy<TAB>clean, got {line!r}"
            )
        pairs.append((parts[0], parts[1]))
    return pairs


def _parse_hyper(pairs) -> dict:
    """--hyper key=value entries; values read as JSON, falling back to str."""
    out = {}
    for item in pairs:
        if "=" not in item:
            raise click.BadParameter(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _load_spaces(cfg: PipelineConfig):
    """(en, hi, projection) per the config; unset entries come back None."""
    en = load_embeddings(cfg.en_embeddings) if cfg.en_embeddings else None
    hi = load_embeddings(cfg.hi_embeddings) if cfg.hi_embeddings else None
    projection = load_projection(cfg.projection) if cfg.projection else None
    if not cfg.use_crosslingual:
        projection = None
    return en, hi, projection


config_option = click.option(
    "-c",
    "--config",
    "config_path",
    type=click.Path(),
    default=None,
    help="JSON config file naming resources and models.",
)
seed_option = click.option(
    "--seed", type=int, default=None, help="Random seed override."
)
out_option = click.option(
    "-o", "--out", "out_path", type=click.Path(), default=None,
    help="Output file (default: stdout).",
)
hyper_option = click.option(
    "--hyper", "hyper_pairs", multiple=True, metavar="KEY=VALUE",
    help="Model hyperparameter override; repeatable.",
)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def cli():
    """Annotate Hindi-English code-switched text: language ID,
    normalization/back-transliteration, POS tagging, dependency parsing."""


# ----------------------------------------------------------------------
# single stages


@cli.command("langid")
@click.argument("input", type=click.Path())
@config_option
@click.option("-m", "--model", "model_path", type=click.Path(), default=None,
              help="Tagger model (overrides the config).")
@out_option
@seed_option
def langid_cmd(input, config_path, model_path, out_path, seed):
    """Tag each token with its language (form<TAB>tag output)."""
    cfg = _override(_load_config(config_path), langid_model=model_path, seed=seed)
    pipe = AnnotationPipeline.from_config(cfg)
    lines = []
    for sent in _read_sentences(input):
        tags = pipe.identify(sent)
        lines.extend(f"{tok.form}\t{tag}" for tok, tag in zip(sent, tags))
        lines.append("")
    _write_text(out_path, _lines_out(lines))


@cli.command("normalize")
@click.argument("input", type=click.Path())
@click.option("-m", "--model", "model_path", type=click.Path(), required=True,
              help="Character normalizer model file.")
@click.option("-b", "--beam-width", type=int, default=None, help="Beam width.")
@click.option("--n-best", type=int, default=1, show_default=True,
              help="Candidates to print per word.")
@out_option
@seed_option
def normalize_cmd(input, model_path, beam_width, n_best, out_path, seed):
    """Normalize words, one per line (word<TAB>candidate[<TAB>logprob])."""
    if n_best < 1:
        raise click.BadParameter("--n-best must be >= 1")
    model = CharacterNormalizer.load(model_path)
    lines = []
    for line in _read_lines(input):
        word = line.strip()
        if not word:
            continue
        cands = model.candidates(word, b=beam_width)
        if n_best == 1:
            lines.append(f"{word}\t{cands.best}")
        else:
            for text, score in cands.candidates[:n_best]:
                lines.append(f"{word}\t{text}\t{score:.6f}")
    _write_text(out_path, _lines_out(lines))


@cli.command("decode")
@click.argument("input", type=click.Path())
@config_option
@click.option("--decode-mode", type=click.Choice(DECODE_MODES), default=None,
              help="Candidate selection strategy (overrides the config).")
@click.option("-b", "--beam-width", type=int, default=None, help="Beam width.")
@out_option
@seed_option
def decode_cmd(input, config_path, decode_mode, beam_width, out_path, seed):
    """Language-tag, generate candidates, and decode; print decoded text."""
    cfg = _override(
        _load_config(config_path),
        decode_mode=decode_mode, beam_width=beam_width, seed=seed,
    )
    pipe = AnnotationPipeline.from_config(cfg)
    lines = [
        " ".join(pipe.front_end(sent).decoded) for sent in _read_sentences(input)
    ]
    _write_text(out_path, _lines_out(lines))


@cli.command("tag")
@click.argument("input", type=click.Path())
@config_option
@click.option("-m", "--model", "model_path", type=click.Path(), default=None,
              help="Joint model to tag with (overrides the config).")
@out_option
@seed_option
def tag_cmd(input, config_path, model_path, out_path, seed):
    """POS-tag text (form<TAB>upos output).

    Runs language ID and normalization first when those models are
    configured; with a bare tagger it tags the raw forms."""
    cfg = _load_config(config_path)
    if model_path is not None:
        cfg = _override(cfg, tagger_model=model_path)
    elif cfg.tagger_model is None and cfg.parser_model is not None:
        cfg = _override(cfg, tagger_model=cfg.parser_model)
    if cfg.tagger_model is None:
        raise DataError("no tagger model: set tagger_model/parser_model or pass -m")
    pipe = AnnotationPipeline.from_config(cfg)
    lines = []
    for sent in _read_sentences(input):
        work = pipe.front_end(sent).sentence if pipe.langid is not None else sent
        upos = pipe.tagger.tag_only(work)
        lines.extend(f"{tok.form}\t{tag}" for tok, tag in zip(sent, upos))
        lines.append("")
    _write_text(out_path, _lines_out(lines))


@cli.command("parse")
@click.argument("input", type=click.Path())
@config_option
@click.option("-m", "--model", "model_path", type=click.Path(), default=None,
              help="Parser model (overrides the config).")
@click.option("--parse-mode", type=click.Choice(PARSE_MODES), default=None)
@out_option
@seed_option
def parse_cmd(input, config_path, model_path, parse_mode, out_path, seed):
    """Parse a CoNLL-U file as-is: no language ID or normalization reruns."""
    cfg = _override(
        _load_config(config_path),
        parser_model=model_path, parse_mode=parse_mode, seed=seed,
    )
    if cfg.parser_model is None:
        raise DataError("no parser model: set parser_model or pass -m")
    pipe = AnnotationPipeline.from_config(cfg)
    parsed = [pipe.parse(s) for s in read_conllu_file(input)]
    _write_text(out_path, write_conllu(parsed))


# ----------------------------------------------------------------------
# end to end


@cli.command("run")
@click.argument("input", type=click.Path())
@config_option
@click.option("--decode-mode", type=click.Choice(DECODE_MODES), default=None)
@click.option("--parse-mode", type=click.Choice(PARSE_MODES), default=None)
@click.option("-b", "--beam-width", type=int, default=None)
@click.option("--workers", type=int, default=None, help="Worker processes.")
@click.option("--trace", "trace_path", type=click.Path(), default=None,
              help="Write per-sentence stage intermediates as JSON lines.")
@out_option
@seed_option
def run_cmd(input, config_path, decode_mode, parse_mode, beam_width, workers,
            trace_path, out_path, seed):
    """Run the whole pipeline on tokenized text; print CoNLL-U."""
    cfg = _override(
        _load_config(config_path),
        decode_mode=decode_mode, parse_mode=parse_mode,
        beam_width=beam_width, workers=workers, seed=seed,
    )
    pipe = AnnotationPipeline.from_config(cfg)
    sentences = _read_sentences(input)
    outputs = annotate_corpus(pipe, sentences, workers=cfg.workers)
    if trace_path is not None:
        Path(trace_path).write_text(
            "".join(o.to_json() + "\n" for o in outputs),
            encoding="utf-8", newline="\n",
        )
    _write_text(out_path, write_conllu([o.sentence for o in outputs]))


@cli.command("eval")
@click.argument("gold", type=click.Path())
@config_option
@click.option("--condition", "conditions", multiple=True,
              type=click.Choice(CONDITION_LABELS),
              help="Restrict to a condition label; repeatable.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--workers", type=int, default=None)
@out_option
@seed_option
def eval_cmd(gold, config_path, conditions, as_json, workers, out_path, seed):
    """Score the pipeline against a gold CoNLL-U file under the
    gold/auto input grid (language ID x normalization)."""
    cfg = _override(_load_config(config_path), workers=workers, seed=seed)
    pipe = AnnotationPipeline.from_config(cfg)
    corpus = read_conllu_file(gold)
    reports = evaluate(
        pipe, corpus,
        conditions=list(conditions) or None,
        workers=cfg.workers,
    )
    if as_json:
        payload = {
            label: json.loads(report.to_json()) for label, report in reports.items()
        }
        _write_text(out_path, json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return
    lines = []
    for label, report in reports.items():
        parts = [f"{label:20s}"]
        for name in ("uas", "las", "pos_acc"):
            value = getattr(report, name)
            if value is not None:
                parts.append(f"{name.replace('_acc', '').upper()} {value:6.2f}")
        lines.append("  ".join(parts))
    _write_text(out_path, _lines_out(lines))


# ----------------------------------------------------------------------
# training


@cli.command("train-langid")
@click.argument("train", type=click.Path())
@click.option("--dev", "dev_path", type=click.Path(), default=None)
@config_option
@out_option
@hyper_option
@seed_option
def train_langid_cmd(train, dev_path, config_path, out_path, hyper_pairs, seed):
    """Train the language tagger on a form<TAB>tag corpus."""
    if out_path is None:
        raise click.BadParameter("-o/--out is required for training")
    cfg = _override(_load_config(config_path), seed=seed)
    hyper = _parse_hyper(hyper_pairs)
    hyper.setdefault("seed", cfg.seed)
    en, hi, projection = _load_spaces(cfg)
    wordlist = frozenset()
    if cfg.wordlist:
        wordlist = frozenset(
            w.strip().lower() for w in _read_lines(cfg.wordlist) if w.strip()
        )
    resources = LangIdResources(
        en_space=en,
        hi_space=hi,
        dictionary=wordlist,
        transliterator=(
            CharacterNormalizer.load(cfg.hi_normalizer) if cfg.hi_normalizer else None
        ),
        projection=projection,
    )
    if projection is not None:
        hyper.setdefault("use_projection", True)
    model = LanguageIdentifier(**hyper)
    corpus = load_tagged_corpus(train)
    dev = load_tagged_corpus(dev_path) if dev_path else None
    model.fit(corpus, dev=dev, resources=resources)
    model.save(out_path)
    click.echo(f"saved language tagger to {out_path}", err=True)


@cli.command("train-norm")
@click.argument("pairs", type=click.Path())
@click.option("--dev", "dev_path", type=click.Path(), default=None)
@out_option
@hyper_option
@seed_option
def train_norm_cmd(pairs, dev_path, out_path, hyper_pairs, seed):
    """Train a character normalizer on noisy<TAB>clean pairs."""
    if out_path is None:
        raise click.BadParameter("-o/--out is required for training")
    hyper = _parse_hyper(hyper_pairs)
    if seed is not None:
        hyper["seed"] = seed
    train_pairs = _read_pairs(pairs)
    model = CharacterNormalizer(**hyper)
    model.fit(
        [s for s, _ in train_pairs],
        [t for _, t in train_pairs],
        dev=_read_pairs(dev_path) if dev_path else None,
    )
    model.save(out_path)
    click.echo(f"saved normalizer to {out_path}", err=True)


@cli.command("train-lm")
@click.argument("corpus", type=click.Path())
@out_option
@seed_option
def train_lm_cmd(corpus, out_path, seed):
    """Fit the trigram language model; write it in ARPA format."""
    if out_path is None:
        raise click.BadParameter("-o/--out is required for training")
    sentences = [line.split() for line in _read_lines(corpus) if line.split()]
    lm = TrigramLM()
    lm.fit(sentences)
    lm.to_arpa(out_path)
    click.echo(f"saved language model to {out_path}", err=True)


@cli.command("train-parser")
@click.argument("treebank", type=click.Path())
@click.option("--dev", "dev_path", type=click.Path(), default=None)
@config_option
@click.option("--parse-mode", type=click.Choice(PARSE_MODES), default=None)
@click.option("--stacking/--no-stacking", "stacking", default=None,
              help="Feed the config's source_parser into the new model.")
@out_option
@hyper_option
@seed_option
def train_parser_cmd(treebank, dev_path, config_path, parse_mode, stacking,
                     out_path, hyper_pairs, seed):
    """Train the tagger-parser on a CoNLL-U treebank.

    Non-projective gold trees are projectivized on the way in; parse
    output is deprojectivized again, so round trips stay lossless."""
    if out_path is None:
        raise click.BadParameter("-o/--out is required for training")
    cfg = _override(
        _load_config(config_path),
        parse_mode=parse_mode, stacking=stacking, seed=seed,
    )
    hyper = _parse_hyper(hyper_pairs)
    hyper.setdefault("seed", cfg.seed)
    en, hi, projection = _load_spaces(cfg)
    space = merge_spaces(en, hi, projection)
    source = None
    if cfg.stacking:
        if cfg.source_parser is None:
            raise DataError("stacking is on but no source_parser is configured")
        source = StackPropParser.load(
            cfg.source_parser, embeddings=space, source_embeddings=space
        )
    if cfg.parse_mode == "pipeline":
        hyper["pipeline"] = True
    bank = [projectivize(s) for s in read_conllu_file(treebank)]
    dev = read_conllu_file(dev_path) if dev_path else None
    model = StackPropParser(embeddings=space, source=source, **hyper)
    model.fit(bank, dev=dev)
    model.save(out_path)
    click.echo(f"saved parser to {out_path}", err=True)


@cli.command("learn-projection")
@config_option
@out_option
@seed_option
def learn_projection_cmd(config_path, out_path, seed):
    """Fit the orthogonal map from the hi space into the en space."""
    if out_path is None:
        raise click.BadParameter("-o/--out is required")
    cfg = _load_config(config_path)
    missing = [
        name for name in ("hi_embeddings", "en_embeddings", "lexicon")
        if getattr(cfg, name) is None
    ]
    if missing:
        raise DataError(f"learn-projection needs {', '.join(missing)} in the config")
    w = learn_projection(
        load_embeddings(cfg.hi_embeddings),
        load_embeddings(cfg.en_embeddings),
        load_lexicon(cfg.lexicon),
    )
    with open(out_path, "wb") as fh:
        # file handle keeps np.save from appending .npy to the chosen name
        np.save(fh, w)
    click.echo(f"saved projection to {out_path}", err=True)


@cli.command("gen-noise")
@click.argument("words", type=click.Path())
@out_option
@click.option("--max-per-word", type=int, default=4, show_default=True)
@seed_option
def gen_noise_cmd(words, out_path, max_per_word, seed):
    """Synthesize noisy<TAB>clean training pairs from a clean wordlist."""
    vocab = [line.strip() for line in _read_lines(words) if line.strip()]
    pairs = gen_synthetic_pairs(
        vocab, rules=NoiseRuleSet.default(),
        seed=seed if seed is not None else 0,
        max_per_word=max_per_word,
    )
    text = "".join(f"{noisy}\t{clean}\n" for noisy, clean in pairs)
    _write_text(out_path, text)


# ----------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    """Run the CLI without exiting the interpreter; returns the exit code."""
    try:
        cli.main(args=argv, prog_name="csparse", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.UsageError as exc:
        # covers unknown subcommands/flags and bad parameter values
        if isinstance(exc, getattr(click.exceptions, "NoArgsIsHelpError", ())):
            click.echo(exc.format_message())
            return 0
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
