"""
Command handlers behind the CLI. Each handler takes the parsed arguments,
writes its artifacts through a DataManager and returns an exit code.
"""

import json
import logging
import sys
import time
from argparse import Namespace
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, TextIO

from app import __version__
from app.core.config import settings
from app.db.database import db_session
from app.nn.checkpoint import model_from_checkpoint
from app.nn.trainer import default_train_config, train_seq2seq, train_tagger
from app.parsers.corpus_parser import read_corpus, read_word_list
from app.schemas.reports import EvalReport, RunManifest
from app.schemas.schemas import ModelKind, SplitSpec, SynthesisConfig
from app.services.baseline import build_inventory
from app.services.corpus_service import CorpusService, default_synthesis_config
from app.services.data_manager import DataManager, load_eval_report
from app.services.evaluation import compare_models, evaluate_baseline, word_accuracy
from app.services.phonotactics import PhonotacticsService, marker_kind
from app.services.run_registry import RunRegistry, record_manifest
from app.services.syllabifier import Syllabifier

logger = logging.getLogger(__name__)

FAILED_SENTINEL = "?"


def _out_dir(args: Namespace, command: str) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    return settings.data_dir / "runs" / f"{command}_{datetime.now().strftime('%Y%m%d_%H%M%S')}"


def _finish(
    dm: DataManager,
    command: str,
    started: float,
    seed: Optional[int],
    config: Dict[str, Any],
    inputs: Dict[str, str],
) -> None:
    manifest = RunManifest(
        command=command,
        config=config,
        seed=seed,
        inputs=inputs,
        toolkit_version=__version__,
        wall_time_s=round(time.perf_counter() - started, 3),
    )
    dm.write_manifest(manifest)
    record_manifest(manifest.model_copy(update={"outputs": list(dm.outputs)}), dm.out_dir)
    print(f"✅ {command}: {len(dm.outputs)} artifacts written to {dm.out_dir}")


def cmd_stats(args: Namespace) -> int:
    started = time.perf_counter()
    words = read_corpus(args.corpus)
    top_n = args.top_n if args.top_n is not None else settings.top_n
    stats = CorpusService.corpus_stats(words)
    markers = PhonotacticsService.marker_counts(words)

    dm = DataManager(_out_dir(args, "stats"))
    dm.write_json("stats.json", {
        **stats.model_dump(),
        "syllable_count": sum(len(w.syllables) for w in words),
        "markers": {m: {"count": c, "kind": marker_kind(m)} for m, c in markers.items()},
    })
    histogram = PhonotacticsService.syllable_type_histogram(words)
    dm.save_counts("cv_histogram.csv", "template", histogram)
    dm.write_json("cv_histogram.json", histogram)

    positional = PhonotacticsService.positional_histogram(words)
    templates = sorted(set(positional.beginning) | set(positional.middle) | set(positional.end))
    dm.write_csv("cv_positional.csv", ("template", "beginning", "middle", "end"), (
        (t, positional.beginning.get(t, 0), positional.middle.get(t, 0), positional.end.get(t, 0))
        for t in templates
    ))
    dm.write_json("cv_positional.json", positional.model_dump())
    top = PhonotacticsService.top_syllables(words, top_n)
    dm.write_csv("top_syllables.csv", ("rank", "syllable", "frequency"), (
        (rank, s, c) for rank, (s, c) in enumerate(top, start=1)
    ))
    dm.save_counts("length_distribution.csv", "length", CorpusService.length_distribution(words))
    dm.save_counts("syllable_counts.csv", "syllables", CorpusService.syllable_count_distribution(words))
    dm.save_counts("onset_violations.csv", "syllable", PhonotacticsService.onset_violations(words))

    print(f"📊 {stats.word_count} words, length {stats.min_len}-{stats.max_len} (mean {stats.mean_len:.2f})")
    if top:
        print(f"   most frequent syllable: {top[0][0]} ({top[0][1]})")
    _finish(dm, "stats", started, None, {"top_n": top_n}, {"corpus": str(args.corpus)})
    return 0


def cmd_synth(args: Namespace) -> int:
    started = time.perf_counter()
    if args.synth_config:
        data = json.loads(Path(args.synth_config).read_text(encoding="utf-8"))
        if args.seed is not None:
            data["seed"] = args.seed
        if args.words is not None:
            data["word_count"] = args.words
        cfg = SynthesisConfig.model_validate(data)
    else:
        cfg = default_synthesis_config(word_count=args.words, seed=args.seed)

    words = CorpusService.synthesize_corpus(cfg)
    dm = DataManager(_out_dir(args, "synth"))
    dm.save_corpus("corpus.txt", words)
    dm.write_json("synth_config.json", cfg.model_dump())

    stats = CorpusService.corpus_stats(words)
    print(f"🧪 {stats.word_count} synthetic words, mean length {stats.mean_len:.2f}")
    inputs = {"synth_config": str(args.synth_config)} if args.synth_config else {}
    _finish(dm, "synth", started, cfg.seed, cfg.model_dump(), inputs)
    return 0


def cmd_split(args: Namespace) -> int:
    started = time.perf_counter()
    seed = args.seed if args.seed is not None else settings.seed
    spec = SplitSpec.parse(args.split, seed=seed)
    train, valid, test = CorpusService.split(read_corpus(args.corpus), spec)

    dm = DataManager(_out_dir(args, "split"))
    dm.save_corpus("train.txt", train)
    dm.save_corpus("valid.txt", valid)
    dm.save_corpus("test.txt", test)
    print(f"✂️  {len(train)}/{len(valid)}/{len(test)} train/valid/test words")
    _finish(dm, "split", started, seed, spec.model_dump(), {"corpus": str(args.corpus)})
    return 0


def cmd_train(args: Namespace) -> int:
    started = time.perf_counter()
    kind = ModelKind(args.model)
    seed = args.seed if args.seed is not None else settings.seed
    spec = SplitSpec.parse(args.split, seed=seed)
    train, valid, test = CorpusService.split(read_corpus(args.corpus), spec)

    dm = DataManager(_out_dir(args, "train"))
    dm.save_corpus("train.txt", train)
    dm.save_corpus("valid.txt", valid)
    dm.save_corpus("test.txt", test)

    if kind == ModelKind.BASELINE:
        inventory = build_inventory(train)
        dm.save_inventory("inventory.txt", inventory)
        report = evaluate_baseline(inventory, test)
        config: Dict[str, Any] = {"model": kind.value, "split": spec.model_dump()}
    else:
        cfg = default_train_config(
            kind, epochs=args.epochs, batch_size=args.batch_size, learning_rate=args.lr, seed=seed
        )
        if kind == ModelKind.SEQ2SEQ:
            checkpoint, history = train_seq2seq(train, valid, cfg)
        else:
            checkpoint, history = train_tagger(kind, train, valid, cfg)
        dm.save_checkpoint("model.ckpt", checkpoint)
        dm.save_metrics(history)
        syllabifier = Syllabifier(kind, model=model_from_checkpoint(checkpoint))
        report = word_accuracy(syllabifier.predict_raw([w.surface for w in test]), test, model=kind.value)
        config = {"model": kind.value, "split": spec.model_dump(), "train": cfg.model_dump(),
                  "best_epoch": history.best_epoch}

    dm.save_eval_report(report, prefix="test")
    print(f"🎯 {kind.value}: held-out word accuracy {report.accuracy:.2f}% ({report.correct}/{report.total})")
    _finish(dm, "train", started, seed, config, {"corpus": str(args.corpus)})
    return 0


def cmd_eval(args: Namespace) -> int:
    started = time.perf_counter()
    syllabifier = Syllabifier.from_path(args.checkpoint)
    golds = read_corpus(args.corpus)
    surfaces = [w.surface for w in golds]
    name = args.name or syllabifier.kind.value
    dm = DataManager(_out_dir(args, "eval"))

    if syllabifier.kind == ModelKind.BASELINE:
        report = evaluate_baseline(syllabifier.inventory, golds).model_copy(update={"model": name})
    elif syllabifier.kind == ModelKind.SEQ2SEQ:
        traced = syllabifier.attention_traces(surfaces)
        report = word_accuracy([d.raw for d, _ in traced], golds, model=name)
        k = args.trace_k if args.trace_k is not None else settings.attention_trace_k
        _save_traces(dm, traced, report, k)
    else:
        report = word_accuracy(syllabifier.predict_raw(surfaces), golds, model=name)

    dm.save_eval_report(report, prefix=name)
    print(f"🎯 {name}: {report.correct}/{report.total} words correct ({report.accuracy:.2f}%)")
    if report.failed or report.ambiguous:
        print(f"   baseline failures: {report.failed}, ambiguous surfaces: {report.ambiguous}")
    _finish(dm, "eval", started, None, {"name": name},
            {"checkpoint": str(args.checkpoint), "corpus": str(args.corpus)})
    return 0


def _save_traces(dm: DataManager, traced, report: EvalReport, k: int) -> None:
    """Attention matrices for the first k misclassified and the first k correct words."""
    wrong = [i for i, item in enumerate(report.items) if not item.correct][:k]
    right = [i for i, item in enumerate(report.items) if item.correct][:k]
    for label, indices in (("error", wrong), ("correct", right)):
        for n, i in enumerate(indices, start=1):
            dm.save_attention_trace(traced[i][1], f"attention_{label}_{n:02d}.csv")


def cmd_syllabify(args: Namespace, stdin: Optional[TextIO] = None, stdout: Optional[TextIO] = None) -> int:
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    syllabifier = Syllabifier.from_path(args.checkpoint)
    surfaces = read_word_list(stdin.read())
    failed = 0
    for surface in surfaces:
        word = syllabifier.syllabify(surface)
        if word is None:
            failed += 1
        stdout.write((word.to_line() if word is not None else f"{FAILED_SENTINEL}{surface}") + "\n")
    logger.info("Syllabified %d words with %s (%d failed)", len(surfaces), syllabifier.kind.value, failed)
    return 0


def cmd_compare(args: Namespace) -> int:
    started = time.perf_counter()
    reports: Dict[str, EvalReport] = {}
    for path in args.reports:
        report = load_eval_report(path)
        name = report.model if report.model not in reports else Path(path).stem
        reports[name] = report
    rows = compare_models(reports)

    dm = DataManager(_out_dir(args, "compare"))
    dm.save_comparison(rows, list(reports))
    dm.write_json("accuracy.json", {name: r.accuracy for name, r in reports.items()})
    for name, r in reports.items():
        print(f"   {name}: {r.accuracy:.2f}% ({r.correct}/{r.total})")
    print(f"📋 {len(rows)} words misclassified by at least one model")
    _finish(dm, "compare", started, None, {"models": list(reports)}, {"reports": ",".join(map(str, args.reports))})
    return 0


def cmd_runs(args: Namespace) -> int:
    with db_session() as db:
        records = RunRegistry.list_runs(db, limit=args.limit, command=args.command_filter)
        lines: List[str] = [
            f"{r.id:>5}  {r.created_at}  {r.command:<10} seed={r.seed}  {r.wall_time_s:.1f}s  {r.out_dir}"
            for r in records
        ]
    if not lines:
        print("No runs recorded")
    for line in lines:
        print(line)
    return 0
