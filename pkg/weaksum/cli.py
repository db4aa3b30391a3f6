# Copyright 2021 Canonical Ltd.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License version 3 as
# published by the Free Software Foundation.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

"""Command line interface.

Exit codes: 0 on success, 1 on usage or configuration errors and 2 on
data errors.
"""
import argparse
import logging
import pathlib
import sys
from typing import List, NoReturn, Optional, Sequence

from weaksum import __version__, errors, pipeline, synthetic
from weaksum.config import apply_overrides, load_config
from weaksum.fusion import parse_name_list
from weaksum.scorer import BudgetMode

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError as error:
        raise argparse.ArgumentTypeError(f"invalid integer {value!r}") from error
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {number}")
    return number


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=pathlib.Path, help="run configuration file")
    common.add_argument("--out", type=pathlib.Path, help="output directory")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument(
        "--mode",
        choices=[mode.value for mode in BudgetMode],
        help="summary budget",
    )
    common.add_argument(
        "--workers", type=_positive_int, help="threads for per-instance work"
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")
    return common


def _ablation_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--drop",
        type=parse_name_list,
        metavar="LIST",
        help="comma separated signals or groups to ablate, e.g. ext,qa or sem-sim",
    )
    parser.add_argument(
        "--keep",
        type=parse_name_list,
        metavar="LIST",
        help="comma separated signals or groups to keep, e.g. ext,rule-based",
    )


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with one subcommand per stage."""
    common = _common_options()
    parser = _ArgumentParser(
        prog="weaksum",
        description="Weakly supervised topic-based extractive summarization.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    commands.add_parser("ingest", parents=[common], help="build the document store")
    commands.add_parser("signals", parents=[common], help="compute supervision signals")

    fuse = commands.add_parser(
        "fuse", parents=[common], help="fuse signals into labels"
    )
    _ablation_options(fuse)

    train = commands.add_parser("train", parents=[common], help="train the scorer")
    _ablation_options(train)

    summarize = commands.add_parser(
        "summarize", parents=[common], help="write one summary per instance"
    )
    _ablation_options(summarize)
    summarize.add_argument("--model", type=pathlib.Path, help="model file to use")
    source = summarize.add_mutually_exclusive_group()
    source.add_argument(
        "--oracle", action="store_true", help="select sentences from extractive labels"
    )
    source.add_argument(
        "--baseline", choices=["random"], help="emit a baseline instead"
    )

    evaluate = commands.add_parser(
        "eval", parents=[common], help="score summaries and write the report"
    )
    evaluate.add_argument(
        "summaries", nargs="*", type=pathlib.Path, help="summaries files to evaluate"
    )

    synthesize = commands.add_parser(
        "synthesize", parents=[common], help="write a synthetic corpus"
    )
    synthesize.add_argument(
        "--docs", type=_positive_int, default=synthetic.DEFAULT_NUM_DOCS
    )

    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING

    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _print(lines: Sequence[str]) -> None:
    for line in lines:
        print(line)


def _synthesize(args: argparse.Namespace) -> None:
    if args.out is None:
        raise errors.ConfigError(
            brief="synthesize needs an output directory.", resolution="Pass --out DIR."
        )

    seed = args.seed if args.seed is not None else 0
    corpus = synthetic.generate(args.docs, seed=seed)
    paths = synthetic.write_corpus(corpus, args.out, seed=seed)
    _print([f"documents: {len(corpus.records)}", f"config: {paths.config}"])


def run(args: argparse.Namespace) -> None:
    """Run the stage selected by parsed arguments.

    :raises WeaksumError: If the stage fails.
    """
    if args.command == "synthesize":
        _synthesize(args)
        return

    config = apply_overrides(
        load_config(args.config),
        output_dir=args.out,
        seed=args.seed,
        mode=args.mode,
        drop=getattr(args, "drop", None),
        keep=getattr(args, "keep", None),
        workers=args.workers,
    )

    if args.command == "ingest":
        _print(pipeline.cmd_ingest(config).lines())
    elif args.command == "signals":
        _print(pipeline.cmd_signals(config).lines())
    elif args.command == "fuse":
        _print(pipeline.cmd_fuse(config).lines())
    elif args.command == "train":
        _print(pipeline.cmd_train(config).lines())
    elif args.command == "summarize":
        result = pipeline.cmd_summarize(
            config,
            model_path=args.model,
            oracle=args.oracle,
            baseline=args.baseline,
        )
        _print(result.lines())
    elif args.command == "eval":
        report = pipeline.cmd_eval(config, args.summaries or None)
        sys.stdout.write(report.text)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point of the weaksum command.

    :returns: Process exit code.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)

    try:
        run(args)
    except errors.ConfigError as error:
        print(f"weaksum: {error}", file=sys.stderr)
        return EXIT_CONFIG
    except errors.WeaksumError as error:
        print(f"weaksum: {error}", file=sys.stderr)
        return EXIT_DATA

    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
