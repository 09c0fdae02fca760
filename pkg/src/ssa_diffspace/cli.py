"""Command-line interface: ``ssa-diffspace <command> [options]``.

Commands:
    train   Train the difference-subspace detector on an anomaly-free series.
    detect  Score a series with a trained model.
    eval    Train/score one method on a labelled series and print its AUC.
    sweep   Evaluate methods over a parameter grid and write a report.
    mds     Embed the subspaces of a series in three dimensions.
    synth   Generate a labelled synthetic series.

On failure a single line ``error: code=<n> kind=<ExceptionName> msg=<text>`` goes to stderr and
the process exits with 1 (usage), 2 (data) or 3 (numerical).
"""

import argparse
import logging
import sys
from typing import (
    Dict,
    NoReturn,
    Optional,
    Sequence,
)

import numpy as np
from pydantic import ValidationError

from .config import (
    DistanceMetric,
    Method,
    SweepGrid,
    SyntheticSpec,
    load_config,
    load_json_model,
)
from .detector import (
    detect,
    train,
)
from .errors import (
    EvaluationError,
    ParameterError,
    SSADiffspaceError,
)
from .evaluation import (
    embed_series,
    run_experiment,
    sweep,
)
from .io import (
    generate_synthetic,
    load_model,
    load_series,
    save_model,
    write_embedding,
    write_report,
    write_scores,
    write_series,
)
from .types import (
    Dataset,
    SweepReport,
    TimeSeries,
)
from .utils import (
    configure_logging,
    format_float,
)


logger = logging.getLogger(__name__)


class UsageError(SSADiffspaceError):
    """Invalid command line."""

    exit_code = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _input_options() -> argparse.ArgumentParser:
    parent = _Parser(add_help=False)
    parent.add_argument("--input", "-i", required=True, metavar="FILE", help="Series file")
    parent.add_argument("--column", type=int, default=None, help="0-based column of the samples")
    parent.add_argument("--labels-column", type=int, default=None, help="0-based column of 0/1 labels")
    parent.add_argument("--delimiter", default=None, help="Column separator (default: ',' or whitespace)")
    parent.add_argument("--skip-rows", type=int, default=0, help="Header lines to skip")
    return parent


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Log level of the ssa_diffspace logger",
    )
    series = _input_options()

    parser = _Parser(prog="ssa-diffspace", description="Change-point detection with SSA difference subspaces")
    subparsers = parser.add_subparsers(dest="command", help="Command to execute")

    train_parser = subparsers.add_parser("train", parents=[common, series], help="Train on anomaly-free data")
    train_parser.add_argument("--config", "-c", required=True, help="Detector configuration (key = value or .json)")
    train_parser.add_argument("--out", "-o", required=True, help="Model file to write")

    detect_parser = subparsers.add_parser("detect", parents=[common, series], help="Score a series")
    detect_parser.add_argument("--model", "-m", required=True, help="Model file written by 'train'")
    detect_parser.add_argument("--out", "-o", required=True, help="Score file to write")

    eval_parser = subparsers.add_parser("eval", parents=[common, series], help="Print the AUC of one method")
    eval_parser.add_argument("--method", required=True, choices=[m.value for m in Method])
    eval_parser.add_argument("--config", "-c", default=None, help="Detector configuration (not needed for ar)")
    eval_parser.add_argument("--train-len", type=int, default=None, help="Samples in the training prefix")
    eval_parser.add_argument("--test-len", type=int, default=None, help="Samples in the test portion")
    eval_parser.add_argument("--max-order", type=int, default=30, help="Largest AR order (ar only)")

    sweep_parser = subparsers.add_parser("sweep", parents=[common, series], help="Evaluate a parameter grid")
    sweep_parser.add_argument("--grid", "-g", required=True, help="JSON grid of parameter lists")
    sweep_parser.add_argument(
        "--method", action="append", required=True, choices=[m.value for m in Method], help="Repeatable"
    )
    sweep_parser.add_argument("--config", "-c", default=None, help="Base configuration under the grid")
    sweep_parser.add_argument("--train-len", type=int, default=None)
    sweep_parser.add_argument("--test-len", type=int, default=None)
    sweep_parser.add_argument("--workers", type=int, default=1, help="Cells evaluated in parallel")
    sweep_parser.add_argument("--out", "-o", required=True, help="Report file to write")

    mds_parser = subparsers.add_parser("mds", parents=[common, series], help="Embed subspaces with MDS")
    mds_parser.add_argument("--model", "-m", required=True, help="Model file written by 'train'")
    mds_parser.add_argument(
        "--metric", default=DistanceMetric.MIN_ANGLE.value, choices=DistanceMetric.choices()
    )
    mds_parser.add_argument("--dim", type=int, default=3)
    mds_parser.add_argument("--max-ds-dims", type=int, default=None, help="Directions kept per difference subspace")
    mds_parser.add_argument("--out", "-o", required=True, help="Embedding file to write")

    synth_parser = subparsers.add_parser("synth", parents=[common], help="Generate a synthetic series")
    synth_parser.add_argument("--spec", "-s", required=True, help="JSON synthetic series recipe")
    synth_parser.add_argument("--out", "-o", required=True, help="Series file to write")

    return parser


def _load_input(args: argparse.Namespace) -> TimeSeries:
    return load_series(
        args.input,
        column=args.column,
        labels_column=args.labels_column,
        delimiter=args.delimiter,
        skip_rows=args.skip_rows,
    )


def _dataset(args: argparse.Namespace) -> Dataset:
    series = _load_input(args)
    split = None
    if args.train_len is not None:
        test_len = args.test_len if args.test_len is not None else len(series) - args.train_len
        split = (args.train_len, test_len)
    elif args.test_len is not None:
        raise UsageError("--test-len needs --train-len")
    try:
        return Dataset.from_series(series, split)
    except ValidationError as e:
        raise EvaluationError(f"invalid dataset: {e.errors()[0]['msg']}")


def _sweep_grid(path: str, config_path: Optional[str]) -> SweepGrid:
    grid = load_json_model(path, SweepGrid)
    if config_path is None:
        return grid
    base: Dict[str, object] = dict(load_config(config_path).to_key_values())
    if {"tau", "ov_rate"} & (set(grid.grid) | set(grid.base)):
        base.pop("tau", None)
        base.pop("ov_rate", None)
    return SweepGrid(base={**base, **grid.base}, grid=grid.grid)


def _run(args: argparse.Namespace) -> None:
    if args.command == "train":
        config = load_config(args.config)
        model = train(_load_input(args), config)
        save_model(model, args.out)
        print(f"threshold={format_float(model.threshold)}")

    elif args.command == "detect":
        model = load_model(args.model)
        scores = detect(_load_input(args), model)
        write_scores(scores, args.out)
        flagged = sum(1 for point in scores.points if point.flag)
        print(f"scores={len(scores)} flagged={flagged}")

    elif args.command == "eval":
        method = Method(args.method)
        if args.config is None and method is not Method.AR:
            raise UsageError(f"--config is required for method {method.value}")
        config = load_config(args.config) if args.config is not None else None
        _, value = run_experiment(_dataset(args), method, config, args.max_order)
        print(f"auc={format_float(value)}")

    elif args.command == "sweep":
        if args.workers < 1:
            raise ParameterError(f"--workers must be >= 1, got {args.workers}")
        dataset = _dataset(args)
        grid = _sweep_grid(args.grid, args.config)
        report = SweepReport(rows=[])
        for method in dict.fromkeys(args.method):
            report = report.merged(sweep(dataset, method, grid, args.workers))
        write_report(report, args.out)
        for method, (params, value) in report.best_per_method.items():
            print(f"best method={method.value} auc={format_float(value)} params={params}")

    elif args.command == "mds":
        model = load_model(args.model)
        embedding = embed_series(_load_input(args), model, args.metric, args.dim, args.max_ds_dims)
        write_embedding(embedding, args.out)
        print(f"points={len(embedding)} stress={format_float(embedding.stress)}")
        if embedding.warning:
            print(f"warning={embedding.warning}")

    elif args.command == "synth":
        series = generate_synthetic(load_json_model(args.spec, SyntheticSpec))
        write_series(series, args.out)
        print(f"samples={len(series)}")


def _exit_code(error: BaseException) -> int:
    if isinstance(error, SSADiffspaceError):
        return error.exit_code
    if isinstance(error, ValidationError):
        return 1
    if isinstance(error, np.linalg.LinAlgError):
        return 3
    return 2


def _one_line(error: BaseException) -> str:
    if isinstance(error, ValidationError):
        parts = [f"{'.'.join(str(loc) for loc in item['loc']) or 'value'}: {item['msg']}" for item in error.errors()]
        return "; ".join(parts)
    return " ".join(str(error).split()) or type(error).__name__


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        if not args.command:
            parser.print_help()
            return 1
        configure_logging(level=args.log_level)
        _run(args)
    except (SSADiffspaceError, ValidationError, np.linalg.LinAlgError, OSError) as e:
        code = _exit_code(e)
        logger.debug("Command failed", exc_info=True)
        print(f"error: code={code} kind={type(e).__name__} msg={_one_line(e)}", file=sys.stderr)
        return code
    return 0

