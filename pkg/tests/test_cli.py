"""Command-line interface: exit codes, formats, determinism."""

import json
import subprocess

import pytest

from csparse.cli import main
from csparse.conllu import read_conllu_file, validate_tree, write_conllu

from .conftest import DATA, cli_ok

TOY_LINE = "simran match bohot great tha ?"
TOY_TAGS = ["ne", "en", "hi", "en", "hi", "univ"]
TOY_DECODED = "simran match बहुत great था ?"
TOY_UPOS = ["PROPN", "NOUN", "ADV", "ADJ", "AUX", "PUNCT"]


@pytest.fixture
def snippet(tmp_path):
    path = tmp_path / "snippet.txt"
    lines = (DATA / "train.txt").read_text(encoding="utf-8").splitlines()[:3]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def small_gold(tmp_path):
    path = tmp_path / "gold.conllu"
    bank = read_conllu_file(DATA / "train.conllu")[:6]
    path.write_text(write_conllu(bank), encoding="utf-8", newline="\n")
    return path


class TestExitCodes:
    def test_bare_invocation_shows_help(self, capsys):
        assert main([]) == 0
        assert "Usage" in capsys.readouterr().out

    def test_help_flag(self, capsys):
        assert main(["--help"]) == 0
        assert "normalize" in capsys.readouterr().out

    def test_unknown_subcommand(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_unknown_flag(self, capsys):
        assert main(["langid", "--bogus", "x"]) == 1

    def test_bad_flag_value(self, capsys):
        assert main(["run", "in.txt", "--beam-width", "wide"]) == 1

    def test_missing_input_file(self, capsys):
        assert main(["gen-noise", "no-such-words.txt"]) == 2
        assert "no-such-words.txt" in capsys.readouterr().err

    def test_missing_model_file(self, tmp_path, capsys):
        words = tmp_path / "w.txt"
        words.write_text("ghar\n", encoding="utf-8")
        assert main(["normalize", str(words), "-m", "/no/such/model.json"]) == 2
        assert "/no/such/model.json" in capsys.readouterr().err

    def test_broken_config(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"beam_widht": 3}', encoding="utf-8")
        assert main(["decode", "in.txt", "-c", str(cfg)]) == 2
        assert "beam_widht" in capsys.readouterr().err

    def test_training_requires_out(self, tmp_path, capsys):
        pairs = tmp_path / "p.tsv"
        pairs.write_text("a\tb\n", encoding="utf-8")
        assert main(["train-norm", str(pairs)]) == 1


class TestGenNoise:
    def test_deterministic_pairs(self, tmp_path):
        words = tmp_path / "words.txt"
        words.write_text("ghar\nbahut\nyaar\nkitna\n", encoding="utf-8")
        out1, out2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
        cli_ok("gen-noise", str(words), "-o", str(out1), "--seed", "5")
        cli_ok("gen-noise", str(words), "-o", str(out2), "--seed", "5")
        assert out1.read_bytes() == out2.read_bytes()
        for line in out1.read_text(encoding="utf-8").splitlines():
            noisy, clean = line.split("\t")
            assert clean in {"ghar", "bahut", "yaar", "kitna"}


class TestNormalizeCmd:
    def test_known_words(self, toy_models, tmp_path, capsys):
        words = tmp_path / "w.txt"
        words.write_text("ghar\nbahut\n", encoding="utf-8")
        cli_ok("normalize", str(words), "-m", str(toy_models["hi_norm"]))
        out = capsys.readouterr().out.splitlines()
        assert out == ["ghar\tघर", "bahut\tबहुत"]

    def test_n_best_scores_non_increasing(self, toy_models, tmp_path, capsys):
        words = tmp_path / "w.txt"
        words.write_text("ghar\n", encoding="utf-8")
        cli_ok("normalize", str(words), "-m", str(toy_models["hi_norm"]),
               "--n-best", "3")
        rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()]
        assert 1 <= len(rows) <= 3
        scores = [float(score) for _, _, score in rows]
        assert scores == sorted(scores, reverse=True)


class TestLangidCmd:
    def test_tags_toy_sentence(self, toy_models, tmp_path, capsys):
        src = tmp_path / "in.txt"
        src.write_text(TOY_LINE + "\n", encoding="utf-8")
        cli_ok("langid", str(src), "-c", str(toy_models["config"]))
        lines = capsys.readouterr().out.splitlines()
        assert lines[:6] == [
            f"{w}\t{t}" for w, t in zip(TOY_LINE.split(), TOY_TAGS)
        ]
        assert lines[6] == ""


class TestDecodeCmd:
    def test_normalizes_toy_sentence(self, toy_models, tmp_path, capsys):
        src = tmp_path / "in.txt"
        src.write_text(TOY_LINE + "\n", encoding="utf-8")
        cli_ok("decode", str(src), "-c", str(toy_models["config"]))
        assert capsys.readouterr().out.splitlines() == [TOY_DECODED]


class TestTagCmd:
    def test_tags_toy_sentence(self, toy_models, tmp_path, capsys):
        src = tmp_path / "in.txt"
        src.write_text(TOY_LINE + "\n", encoding="utf-8")
        cli_ok("tag", str(src), "-c", str(toy_models["config"]))
        lines = capsys.readouterr().out.splitlines()
        assert lines[:6] == [
            f"{w}\t{t}" for w, t in zip(TOY_LINE.split(), TOY_UPOS)
        ]


class TestParseCmd:
    def test_reproduces_gold_trees(self, toy_models, small_gold, tmp_path):
        out = tmp_path / "parsed.conllu"
        cli_ok("parse", str(small_gold), "-c", str(toy_models["config"]),
               "-o", str(out))
        gold = read_conllu_file(small_gold)
        parsed = read_conllu_file(out)
        assert len(parsed) == len(gold)
        for g, p in zip(gold, parsed):
            assert validate_tree(p) == []
            assert [t.head for t in p] == [t.head for t in g]
            assert [t.deprel for t in p] == [t.deprel for t in g]


class TestRunCmd:
    def test_full_pipeline_output(self, toy_models, snippet, tmp_path):
        out = tmp_path / "out.conllu"
        trace = tmp_path / "trace.jsonl"
        cli_ok("run", str(snippet), "-c", str(toy_models["config"]),
               "-o", str(out), "--trace", str(trace))
        parsed = read_conllu_file(out)
        assert len(parsed) == 3
        for sent in parsed:
            assert validate_tree(sent) == []
            assert all(t.lang is not None for t in sent)
        norms = {t.form: t.norm for t in parsed[0]}
        assert norms["bohot"] == "बहुत"

        records = [
            json.loads(line)
            for line in trace.read_text(encoding="utf-8").splitlines()
        ]
        assert len(records) == 3
        first = records[0]
        assert first["forms"] == TOY_LINE.split()
        assert first["decoded"] == TOY_DECODED.split()
        assert len(first["candidates"]) == len(first["forms"])

    def test_seeded_runs_byte_identical(self, toy_models, snippet, tmp_path):
        outs = []
        for name in ("a.conllu", "b.conllu"):
            out = tmp_path / name
            cli_ok("run", str(snippet), "-c", str(toy_models["config"]),
                   "--seed", "0", "-o", str(out))
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_worker_count_does_not_change_output(self, toy_models, snippet,
                                                 tmp_path):
        serial = tmp_path / "serial.conllu"
        parallel = tmp_path / "parallel.conllu"
        cli_ok("run", str(snippet), "-c", str(toy_models["config"]),
               "-o", str(serial))
        cli_ok("run", str(snippet), "-c", str(toy_models["config"]),
               "--workers", "2", "-o", str(parallel))
        assert serial.read_bytes() == parallel.read_bytes()


class TestEvalCmd:
    def test_json_report(self, toy_models, small_gold, capsys):
        cli_ok("eval", str(small_gold), "-c", str(toy_models["config"]),
               "--condition", "auto-lid+auto-trn", "--json")
        payload = json.loads(capsys.readouterr().out)
        assert list(payload) == ["auto-lid+auto-trn"]
        report = payload["auto-lid+auto-trn"]
        assert 0.0 <= report["las"] <= report["uas"] <= 100.0

    def test_table_lists_conditions(self, toy_models, small_gold, capsys):
        cli_ok("eval", str(small_gold), "-c", str(toy_models["config"]),
               "--condition", "gold-lid+gold-trn",
               "--condition", "auto-lid+auto-trn")
        out = capsys.readouterr().out
        assert "gold-lid+gold-trn" in out
        assert "auto-lid+auto-trn" in out
        assert "UAS" in out

    def test_unknown_condition_is_usage_error(self, toy_models, small_gold,
                                              capsys):
        assert main(["eval", str(small_gold), "-c", str(toy_models["config"]),
                     "--condition", "silver"]) == 1


class TestEnvOverrides:
    def test_env_var_reaches_config(self, toy_models, snippet, monkeypatch,
                                    capsys):
        monkeypatch.setenv("CSPARSE_BEAM_WIDTH", "2")
        cli_ok("decode", str(snippet), "-c", str(toy_models["config"]))
        assert len(capsys.readouterr().out.splitlines()) == 3

    def test_env_decode_mode(self, toy_models, snippet, monkeypatch, capsys):
        monkeypatch.setenv("CSPARSE_DECODE_MODE", "first-best")
        cli_ok("decode", str(snippet), "-c", str(toy_models["config"]))
        assert len(capsys.readouterr().out.splitlines()) == 3


class TestConsoleScript:
    def test_installed_entry_point(self):
        proc = subprocess.run(
            ["csparse", "--help"], capture_output=True, text=True, timeout=60
        )
        assert proc.returncode == 0
        assert "Usage" in proc.stdout
