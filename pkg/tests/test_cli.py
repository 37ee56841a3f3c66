import io
import json
import sys

import pytest

from app.api.cli import EXIT_INVALID, EXIT_OK, EXIT_RUNTIME, argparser, main
from app.core.config import settings
from app.parsers.corpus_parser import parse_corpus, read_corpus


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.txt"
    path.write_text("te nyi die\nshe so u\nchü ü mo -u\ntse i ü\nke\nkhrie\n", encoding="utf-8")
    return path


@pytest.fixture
def synthetic_corpus(tmp_path, isolated_ledger):
    out = tmp_path / "synth"
    assert main(["synth", "--words", "300", "--seed", "3", "--out", str(out)]) == EXIT_OK
    return out / "corpus.txt"


@pytest.fixture
def small_networks(monkeypatch):
    monkeypatch.setattr(settings, "embedding_dim", 8)
    monkeypatch.setattr(settings, "hidden_dim", 8)
    monkeypatch.setattr(settings, "seq2seq_units", 4)
    monkeypatch.setattr(settings, "attention_trace_k", 2)


@pytest.fixture
def lstm_checkpoint(tmp_path, synthetic_corpus, small_networks):
    out = tmp_path / "lstm"
    args = ["train", "--model", "lstm", "--corpus", str(synthetic_corpus), "--epochs", "1", "--out", str(out)]
    assert main(args) == EXIT_OK
    return out / "model.ckpt"


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        argparser().parse_args([])
    args = argparser().parse_args(["runs", "--command", "train"])
    assert args.command == "runs"
    assert args.command_filter == "train"


def test_stats(tmp_path, corpus_file, isolated_ledger, capsys):
    out = tmp_path / "stats"
    assert main(["stats", "--corpus", str(corpus_file), "--top-n", "3", "--out", str(out)]) == EXIT_OK

    stats = json.loads((out / "stats.json").read_text(encoding="utf-8"))
    assert stats["word_count"] == 6
    assert stats["markers"] == {"-u": {"count": 1, "kind": "definite"}}
    for name in ("cv_histogram.csv", "cv_positional.csv", "top_syllables.csv", "length_distribution.csv",
                 "syllable_counts.csv", "onset_violations.csv", "manifest.json"):
        assert (out / name).exists(), name
    top = (out / "top_syllables.csv").read_text(encoding="utf-8").splitlines()
    assert top[0] == "rank,syllable,frequency"
    assert len(top) == 4
    assert json.loads((out / "cv_histogram.json").read_text(encoding="utf-8"))["CV"] >= 1
    assert set(json.loads((out / "cv_positional.json").read_text(encoding="utf-8"))) == {"beginning", "middle", "end"}

    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "stats"
    assert "stats.json" in manifest["outputs"]
    assert "6 words" in capsys.readouterr().out


def test_invalid_corpus_exits_2(tmp_path, isolated_ledger, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("ke nyü\nke x1\n", encoding="utf-8")
    assert main(["stats", "--corpus", str(bad), "--out", str(tmp_path / "o")]) == EXIT_INVALID
    assert "line 2" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path, isolated_ledger):
    assert main(["stats", "--corpus", str(tmp_path / "nope.txt")]) == EXIT_RUNTIME


def test_bad_split_ratio_exits_2(corpus_file, tmp_path, isolated_ledger):
    assert main(["split", "--corpus", str(corpus_file), "--split", "80:20", "--out", str(tmp_path / "s")]) == EXIT_INVALID


def test_synth_is_seeded(tmp_path, synthetic_corpus):
    words = read_corpus(synthetic_corpus)
    assert len(words) == 300
    again = tmp_path / "again"
    assert main(["synth", "--words", "300", "--seed", "3", "--out", str(again)]) == EXIT_OK
    assert (again / "corpus.txt").read_bytes() == synthetic_corpus.read_bytes()
    assert json.loads((again / "synth_config.json").read_text(encoding="utf-8"))["seed"] == 3


def test_synth_config_file(tmp_path, isolated_ledger):
    cfg = tmp_path / "synth.json"
    cfg.write_text(json.dumps({"syllable_table": [["ke", 1]], "fixed_syllable_count": 2}), encoding="utf-8")
    out = tmp_path / "out"
    assert main(["synth", "--synth-config", str(cfg), "--words", "5", "--out", str(out)]) == EXIT_OK
    assert (out / "corpus.txt").read_text(encoding="utf-8") == "ke ke\n" * 5


def test_split(tmp_path, synthetic_corpus):
    out = tmp_path / "split"
    assert main(["split", "--corpus", str(synthetic_corpus), "--seed", "1", "--out", str(out)]) == EXIT_OK
    sizes = [len(read_corpus(out / f"{part}.txt")) for part in ("train", "valid", "test")]
    assert sizes == [240, 30, 30]


def test_baseline_train_eval_syllabify(tmp_path, synthetic_corpus, monkeypatch, capsys):
    out = tmp_path / "baseline"
    assert main(["train", "--model", "baseline", "--corpus", str(synthetic_corpus), "--out", str(out)]) == EXIT_OK
    assert (out / "inventory.txt").exists()
    report = json.loads((out / "test_report.json").read_text(encoding="utf-8"))
    assert report["total"] == 30
    assert "held-out word accuracy" in capsys.readouterr().out

    eval_out = tmp_path / "eval"
    args = ["eval", "--checkpoint", str(out / "inventory.txt"), "--corpus", str(out / "test.txt"),
            "--name", "lm", "--out", str(eval_out)]
    assert main(args) == EXIT_OK
    assert (eval_out / "lm_report.json").exists()
    assert (eval_out / "lm_errors.csv").exists()
    capsys.readouterr()

    monkeypatch.setattr(sys, "stdin", io.StringIO("Keke\nxyzword\n"))
    assert main(["syllabify", "--checkpoint", str(out / "inventory.txt")]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "ke ke"
    assert lines[1] == "?xyzword"


@pytest.mark.parametrize("model", ["lstm", "blstm-crf"])
def test_tagger_train_eval_compare(tmp_path, synthetic_corpus, small_networks, model):
    out = tmp_path / model
    args = ["train", "--model", model, "--corpus", str(synthetic_corpus), "--epochs", "2", "--out", str(out)]
    assert main(args) == EXIT_OK
    assert (out / "model.ckpt").exists()
    metrics = (out / "metrics.csv").read_text(encoding="utf-8").splitlines()
    assert metrics[0] == "epoch,train_loss,train_acc,valid_loss,valid_acc,valid_word_acc"
    assert len(metrics) == 3

    eval_out = tmp_path / "eval"
    args = ["eval", "--checkpoint", str(out / "model.ckpt"), "--corpus", str(out / "test.txt"), "--out", str(eval_out)]
    assert main(args) == EXIT_OK

    compare_out = tmp_path / "compare"
    reports = [str(out / "test_report.json"), str(eval_out / f"{model}_report.json")]
    assert main(["compare", *reports, "--out", str(compare_out)]) == EXIT_OK
    header = (compare_out / "comparison.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("word,gold,")
    assert (compare_out / "accuracy.json").exists()


def test_seq2seq_eval_writes_attention_traces(tmp_path, synthetic_corpus, small_networks):
    out = tmp_path / "s2s"
    args = ["train", "--model", "seq2seq", "--corpus", str(synthetic_corpus), "--epochs", "1", "--out", str(out)]
    assert main(args) == EXIT_OK

    eval_out = tmp_path / "eval"
    args = ["eval", "--checkpoint", str(out / "model.ckpt"), "--corpus", str(out / "test.txt"), "--out", str(eval_out)]
    assert main(args) == EXIT_OK
    traces = sorted(p.name for p in eval_out.glob("attention_*.csv"))
    assert traces
    assert len(traces) <= 4
    header = (eval_out / traces[0]).read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("tag,")


def test_compare_needs_two_reports(tmp_path, synthetic_corpus):
    out = tmp_path / "baseline"
    assert main(["train", "--model", "baseline", "--corpus", str(synthetic_corpus), "--out", str(out)]) == EXIT_OK
    assert main(["compare", str(out / "test_report.json"), "--out", str(tmp_path / "c")]) == EXIT_INVALID


def test_runs_lists_recorded_commands(tmp_path, synthetic_corpus, capsys):
    main(["split", "--corpus", str(synthetic_corpus), "--out", str(tmp_path / "split")])
    capsys.readouterr()
    assert main(["runs"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "synth" in out and "split" in out
    assert main(["runs", "--command", "synth"]) == EXIT_OK
    assert "split" not in capsys.readouterr().out


def test_syllabify_keeps_going_past_bad_lines(lstm_checkpoint, monkeypatch, capsys):
    capsys.readouterr()
    monkeypatch.setattr(sys, "stdin", io.StringIO("ke\n-\nkeke\nxyzword\nke-u\n"))
    assert main(["syllabify", "--checkpoint", str(lstm_checkpoint)]) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 5
    assert lines[1] == "?-"
    assert lines[3] == "?xyzword"
    parsed = parse_corpus("\n".join([lines[0], lines[2], lines[4]]))
    assert [w.surface for w in parsed] == ["ke", "keke", "ke-u"]


def test_syllabify_output_round_trips_through_the_corpus_parser(lstm_checkpoint, monkeypatch, capsys):
    test_words = read_corpus(lstm_checkpoint.parent / "test.txt")
    capsys.readouterr()
    monkeypatch.setattr(sys, "stdin", io.StringIO("".join(w.surface + "\n" for w in test_words)))
    assert main(["syllabify", "--checkpoint", str(lstm_checkpoint)]) == EXIT_OK
    parsed = parse_corpus(capsys.readouterr().out)
    assert [w.surface for w in parsed] == [w.surface for w in test_words]


def test_zero_trace_k_writes_no_traces(tmp_path, synthetic_corpus, small_networks):
    out = tmp_path / "s2s"
    args = ["train", "--model", "seq2seq", "--corpus", str(synthetic_corpus), "--epochs", "1", "--out", str(out)]
    assert main(args) == EXIT_OK
    eval_out = tmp_path / "eval"
    args = ["eval", "--checkpoint", str(out / "model.ckpt"), "--corpus", str(out / "test.txt"),
            "--trace-k", "0", "--out", str(eval_out)]
    assert main(args) == EXIT_OK
    assert not list(eval_out.glob("attention_*.csv"))
    assert (eval_out / "seq2seq_report.json").exists()
