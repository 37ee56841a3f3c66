"""
Command-line entry point: stats, synth, split, train, eval, syllabify, compare, runs.

Exit codes: 0 success, 1 runtime failure, 2 invalid input.
"""

import logging
import sys
from argparse import ArgumentParser
from typing import List, Optional

from pydantic import ValidationError

from app import __version__
from app.api import commands
from app.core.config import settings
from app.core.errors import ToolkitError
from app.core.logging import configure_logging
from app.schemas.schemas import ModelKind

logger = logging.getLogger(__name__)

DESCRIPTION = "Grapheme-level syllabification toolkit for Tenyidie"

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_INVALID = 2


def argparser() -> ArgumentParser:
    ap = ArgumentParser(prog="tenyidie", description=DESCRIPTION)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--log-level", default=None, help="override TENYIDIE_LOG_LEVEL")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="corpus statistics, CV histograms and ranked syllables")
    p.add_argument("--corpus", required=True)
    p.add_argument("--top-n", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=commands.cmd_stats)

    p = sub.add_parser("synth", help="generate a synthetic syllabified corpus")
    p.add_argument("--synth-config", default=None, help="JSON file with generator settings")
    p.add_argument("--words", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=commands.cmd_synth)

    p = sub.add_parser("split", help="seeded train/valid/test split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="80:10:10")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=commands.cmd_split)

    p = sub.add_parser("train", help="split, train and evaluate one model")
    p.add_argument("--model", required=True, choices=[k.value for k in ModelKind])
    p.add_argument("--corpus", required=True)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--split", default="80:10:10")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=commands.cmd_train)

    p = sub.add_parser("eval", help="word accuracy and error rows for a checkpoint or inventory")
    p.add_argument("--checkpoint", required=True, help="model checkpoint or baseline inventory file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--name", default=None, help="model name used in report file names")
    p.add_argument("--trace-k", type=int, default=None, help="attention traces per class (seq2seq)")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=commands.cmd_eval)

    p = sub.add_parser("syllabify", help="syllabify words read from standard input")
    p.add_argument("--checkpoint", required=True, help="model checkpoint or baseline inventory file")
    p.set_defaults(handler=commands.cmd_syllabify)

    p = sub.add_parser("compare", help="cross-model comparison of saved evaluation reports")
    p.add_argument("reports", nargs="+", help="*_report.json files from eval or train")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=commands.cmd_compare)

    p = sub.add_parser("runs", help="list recorded runs")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--command", dest="command_filter", default=None)
    p.set_defaults(handler=commands.cmd_runs)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = argparser().parse_args(argv)
    configure_logging(args.log_level or settings.log_level)
    try:
        return args.handler(args)
    except (ValidationError, ValueError) as e:
        # ToolkitErrors raised for bad input also subclass ValueError
        print(f"❌ invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (ToolkitError, OSError) as e:
        print(f"❌ {args.command} failed: {e}", file=sys.stderr)
        if settings.debug:
            logger.exception("Command %s failed", args.command)
        return EXIT_RUNTIME
