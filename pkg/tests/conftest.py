"""Shared fixtures.

The expensive one is ``toy_models``: it trains every model on the
bundled toy corpus through the real CLI, once per session, and hands
the resulting file paths to whichever tests need a working end-to-end
setup.
"""

import json
import time
from pathlib import Path

import pytest

from csparse.cli import main

DATA = Path(__file__).resolve().parent.parent / "data" / "toy"

HI_NORM_HYPER = [
    "--hyper", "char_dim=12", "--hyper", "hidden_dim=48",
    "--hyper", "epochs=40", "--hyper", "batch_size=16",
    "--hyper", "lr=1.0", "--hyper", "lr_decay_start=25",
    "--hyper", "dropout=0.0", "--hyper", "beam_width=5",
]
EN_NORM_HYPER = [
    "--hyper", "char_dim=12", "--hyper", "hidden_dim=48",
    "--hyper", "epochs=25", "--hyper", "batch_size=16",
    "--hyper", "lr=1.0", "--hyper", "lr_decay_start=20",
    "--hyper", "dropout=0.0", "--hyper", "beam_width=5",
]
LANGID_HYPER = [
    "--hyper", "char_dim=12", "--hyper", "char_hidden=16",
    "--hyper", "flag_dim=4", "--hyper", "sent_hidden=24",
    "--hyper", "mlp_hidden=24", "--hyper", "dropout=0.2",
    "--hyper", "epochs=30",
]
PARSER_HYPER = [
    "--hyper", "char_dim=12", "--hyper", "char_hidden=16",
    "--hyper", "shared_hidden=32", "--hyper", "tagger_hidden=32",
    "--hyper", "tagger_mlp=24", "--hyper", "parser_hidden=48",
    "--hyper", "parser_mlp=48", "--hyper", "dropout=0.0",
    "--hyper", "epochs=45", "--hyper", "lr=0.1",
]


def cli_ok(*argv):
    code = main(list(argv))
    assert code == 0, f"csparse {' '.join(argv)} exited {code}"


@pytest.fixture(scope="session")
def toy_models(tmp_path_factory):
    """Train all toy models through the CLI; returns the path map."""
    work = tmp_path_factory.mktemp("toy-models")
    paths = {
        "data": DATA,
        "treebank": DATA / "train.conllu",
        "text": DATA / "train.txt",
        "langid_tsv": DATA / "langid.tsv",
        "hi_norm": work / "hi_norm.json",
        "en_norm": work / "en_norm.json",
        "lm_en": work / "lm_en.arpa",
        "lm_hi": work / "lm_hi.arpa",
        "projection": work / "projection.npy",
        "langid": work / "langid.json",
        "parser": work / "parser.json",
        "train_config": work / "train_config.json",
        "config": work / "config.json",
    }

    started = time.monotonic()
    cli_ok("train-norm", str(DATA / "hi_pairs.tsv"),
           "-o", str(paths["hi_norm"]), "--seed", "0", *HI_NORM_HYPER)
    cli_ok("train-norm", str(DATA / "en_pairs.tsv"),
           "-o", str(paths["en_norm"]), "--seed", "0", *EN_NORM_HYPER)
    cli_ok("train-lm", str(DATA / "lm_en.txt"), "-o", str(paths["lm_en"]))
    cli_ok("train-lm", str(DATA / "lm_hi.txt"), "-o", str(paths["lm_hi"]))
    cli_ok("learn-projection", "-c", str(DATA / "config.json"),
           "-o", str(paths["projection"]))

    resources = {
        "schema_version": 1,
        "en_embeddings": str(DATA / "en_vectors.txt"),
        "hi_embeddings": str(DATA / "hi_vectors.txt"),
        "lexicon": str(DATA / "lexicon.tsv"),
        "wordlist": str(DATA / "wordlist.txt"),
        "lm_en": str(paths["lm_en"]),
        "lm_hi": str(paths["lm_hi"]),
        "hi_normalizer": str(paths["hi_norm"]),
        "en_normalizer": str(paths["en_norm"]),
        "projection": str(paths["projection"]),
        "beam_width": 5,
        "use_crosslingual": True,
        "decode_mode": "3-step",
        "parse_mode": "stackprop",
        "seed": 0,
    }
    paths["train_config"].write_text(
        json.dumps(resources, indent=2), encoding="utf-8"
    )

    cli_ok("train-langid", str(DATA / "langid.tsv"),
           "-c", str(paths["train_config"]),
           "-o", str(paths["langid"]), *LANGID_HYPER)
    cli_ok("train-parser", str(DATA / "train.conllu"),
           "-c", str(paths["train_config"]),
           "-o", str(paths["parser"]), *PARSER_HYPER)

    paths["train_seconds"] = time.monotonic() - started

    full = dict(resources,
                langid_model=str(paths["langid"]),
                parser_model=str(paths["parser"]))
    paths["config"].write_text(json.dumps(full, indent=2), encoding="utf-8")
    return paths
