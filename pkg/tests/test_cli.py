from __future__ import annotations

import pytest

from paralat.cli import derive_seed, main
from paralat.data_files import data_path
from paralat.grammar import save_grammar


@pytest.fixture(scope="module")
def grammar_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "mini.lpcfg"
    rc = main([
        "train-grammar",
        "--treebank", data_path("minitreebank.trees"),
        "--m1", "2", "--seed", "1",
        "--out", str(path),
    ])
    assert rc == 0
    return str(path)


@pytest.fixture(scope="module")
def classifier_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "clf.tsv"
    rc = main([
        "train-classifier",
        "--pairs", data_path("classifier_pairs.tsv"),
        "--gazetteer", data_path("gazetteer.txt"),
        "--epochs", "200", "--seed", "0",
        "--out", str(path),
    ])
    assert rc == 0
    return str(path)


class TestExitCodes:
    def test_usage_error_unknown_flag(self):
        assert main(["train-grammar", "--nope"]) == 1

    def test_usage_error_missing_required(self):
        assert main(["train-grammar"]) == 1

    def test_usage_error_no_command(self):
        assert main([]) == 1

    def test_data_error_missing_file(self, tmp_path):
        rc = main([
            "train-grammar", "--treebank", str(tmp_path / "nope.trees"),
            "--out", str(tmp_path / "g.lpcfg"),
        ])
        assert rc == 2

    def test_data_error_bad_grammar(self, tmp_path):
        bad = tmp_path / "bad.lpcfg"
        bad.write_text("nonsense\n", encoding="utf-8")
        assert main(["validate-grammar", "--grammar", str(bad)]) == 2


class TestValidateGrammar:
    def test_fresh_mle_grammar_validates(self, grammar_file, capsys):
        assert main(["validate-grammar", "--grammar", grammar_file]) == 0
        out = capsys.readouterr().out
        assert "0 violation(s)" in out

    def test_invalid_grammar_exits_2(self, tmp_path, bilayered_toy_grammar, capsys):
        import dataclasses

        broken = dataclasses.replace(
            bilayered_toy_grammar,
            roots={k: v * 0.5 for k, v in bilayered_toy_grammar.roots.items()},
        )
        path = tmp_path / "broken.lpcfg"
        save_grammar(broken, str(path))
        assert main(["validate-grammar", "--grammar", str(path)]) == 2
        assert "violation" in capsys.readouterr().out


class TestParse:
    def test_figure_notation(self, tmp_path, bilayered_toy_grammar, capsys):
        path = tmp_path / "toy.lpcfg"
        save_grammar(bilayered_toy_grammar, str(path))
        rc = main([
            "parse", "--grammar", str(path),
            "--question", "what day is nochebuena",
        ])
        assert rc == 0
        out = capsys.readouterr().out
        assert out.startswith("(SBARQ-33-403 (WHNP-7-291 (WP-7-254 what)")


class TestSample:
    def test_output_format_and_determinism(self, grammar_file, tmp_path):
        out_a = tmp_path / "a.tsv"
        out_b = tmp_path / "b.tsv"
        argv = [
            "sample", "--grammar", grammar_file,
            "--question", "what day is christmas",
            "--lattice", "rules", "--rules", data_path("rewrite_rules.tsv"),
            "--m", "50", "--seed", "3",
        ]
        assert main(argv + ["--out", str(out_a)]) == 0
        assert main(argv + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        lines = out_a.read_text(encoding="utf-8").splitlines()
        assert lines
        for line in lines:
            seed, text = line.split("\t")
            assert seed.isdigit()
            assert text


class TestBuildLattice:
    def test_naive_dump(self, capsys):
        rc = main(["build-lattice", "--mode", "naive", "--question", "why so serious"])
        assert rc == 0
        out = capsys.readouterr().out
        assert "NODE 0" in out
        assert "EDGE 0 1 why input" in out


class TestParaphrase:
    def test_never_emits_input_question(self, grammar_file, classifier_file, tmp_path):
        questions = tmp_path / "q.txt"
        questions.write_text(
            "what day is nochebuena\nwhen is easter\n", encoding="utf-8"
        )
        out = tmp_path / "para.tsv"
        rc = main([
            "paraphrase", "--grammar", grammar_file,
            "--mode", "rules", "--rules", data_path("rewrite_rules.tsv"),
            "--classifier", classifier_file,
            "--gazetteer", data_path("gazetteer.txt"),
            "--input", str(questions),
            "--m", "150", "--seed", "11",
            "--out", str(out),
        ])
        assert rc == 0
        rows = [
            line.split("\t")
            for line in out.read_text(encoding="utf-8").splitlines()
        ]
        assert rows
        for question, candidate, score in rows:
            assert candidate != question
            assert 0.0 <= float(score) <= 1.0

    def test_reruns_byte_identical(self, grammar_file, classifier_file, tmp_path):
        argv = [
            "paraphrase", "--grammar", grammar_file,
            "--mode", "naive",
            "--classifier", classifier_file,
            "--question", "what day is nochebuena",
            "--m", "30", "--seed", "5", "--threshold", "0.0",
        ]
        a = tmp_path / "a.tsv"
        b = tmp_path / "b.tsv"
        assert main(argv + ["--out", str(a)]) == 0
        assert main(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()


class TestConfigFile:
    def test_config_supplies_defaults_flags_win(self, tmp_path):
        config = tmp_path / "pipeline.cfg"
        grammar_out = tmp_path / "g.lpcfg"
        config.write_text(
            "treebank={}\nm1=2\nseed=1\nout={}\n".format(
                data_path("minitreebank.trees"), grammar_out
            ),
            encoding="utf-8",
        )
        assert main(["train-grammar", "--config", str(config)]) == 0
        assert grammar_out.exists()
        first = grammar_out.read_bytes()
        # A flag overrides the config value.
        assert main([
            "train-grammar", "--config", str(config), "--m1", "3",
        ]) == 0
        assert grammar_out.read_bytes() != first


class TestSemparse:
    def test_train_then_eval_report(self, tmp_path, capsys):
        model = tmp_path / "model.tsv"
        rc = main([
            "semparse-train",
            "--kb", data_path("kb.tsv"),
            "--qa", data_path("qa_train.tsv"),
            "--graphs-dir", data_path("graphs"),
            "--epochs", "5", "--beam", "100", "--seed", "0",
            "--out", str(model),
        ])
        assert rc == 0
        report = tmp_path / "report.tsv"
        rc = main([
            "semparse-eval",
            "--kb", data_path("kb.tsv"),
            "--qa", data_path("qa_eval.tsv"),
            "--graphs-dir", data_path("graphs"),
            "--model", str(model),
            "--out", str(report),
        ])
        assert rc == 0
        lines = report.read_text(encoding="utf-8").splitlines()
        assert lines[-1].startswith("AVG\t")
        avg_f1 = float(lines[-1].split("\t")[3])
        assert 0.0 <= avg_f1 <= 1.0


class TestSeedFanOut:
    def test_fixed_derivation(self):
        assert derive_seed(1, "sample", 0) == derive_seed(1, "sample", 0)
        assert derive_seed(1, "sample", 0) != derive_seed(1, "sample", 1)
        assert derive_seed(1, "sample", 0) != derive_seed(1, "paraphrase", 0)
