"""Command-line entry point.

Usage:
    scsvm train --data toy.svm --signs toy_signs.txt --lambda 0.1 --model toy.json
    scsvm predict --model toy.json --data toy.svm --scores toy.scores --auc
    scsvm pairwise --similarity sim.csv --labels labels.txt --data pw.svm --signs pw_signs.txt
    scsvm eval --data toy.svm --signs toy_signs.txt --report reports.json
    scsvm verify --check rate --lambda 0.1 --epsilon 0.01
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from scsvm.config import DataFormat, ScheduleKind, SolverName, get_settings
from scsvm.errors import DimensionMismatchError, ScsvmError
from scsvm.models import Dataset, SignMask
from scsvm.services.artifacts import (
    load_model,
    save_model,
    write_index_map,
    write_reports,
    write_scores,
    write_trace,
)
from scsvm.services.data_io import (
    apply_sign_mask,
    load_dataset,
    load_sign_mask,
    load_similarity,
    normalize_unit,
    pairwise_raw,
    write_dataset,
    write_sign_mask,
)
from scsvm.services.evaluation import (
    TrainSpec,
    auc,
    compare_sign_constraints,
    evaluate_holdout,
    default_lambda_grid,
    roc_points,
)
from scsvm.services.fw_solver import FwConfig, fw_train
from scsvm.services.oracles import OracleConfig
from scsvm.services.pg_solver import PgConfig, make_schedule, pg_train
from scsvm.services.verification import CheckName, run_checks

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_CERTIFIED = 3

DEFAULT_MAX_ITER = {SolverName.FW: 1000, SolverName.PG: 100}


def _add_data_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument("--data", type=Path, required=required, help="dataset file")
    parser.add_argument(
        "--format",
        type=DataFormat,
        choices=list(DataFormat),
        default=None,
        help="dataset format (default: dense for .csv files, sparse otherwise)",
    )
    parser.add_argument(
        "--zero-one-labels",
        action="store_true",
        help="labels are 0/1 instead of -1/+1",
    )


def _add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--solver",
        type=SolverName,
        choices=list(SolverName),
        default=SolverName.FW,
        help="training algorithm (default: fw)",
    )
    parser.add_argument("--epsilon", type=float, default=1e-3, help="FW duality-gap target")
    parser.add_argument(
        "--max-iter",
        type=int,
        default=None,
        help="iteration budget (default: 1000 for fw, 100 for pg)",
    )
    parser.add_argument(
        "--eval-schedule",
        type=ScheduleKind,
        choices=list(ScheduleKind),
        default=ScheduleKind.LOG,
        help="PG iterations at which P is recorded (default: log)",
    )
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument(
        "--normalize",
        action="store_true",
        help="scale every example to unit norm before training",
    )


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser with all subcommands."""
    parser = argparse.ArgumentParser(
        prog="scsvm",
        description="Sign-constrained linear SVM training and evaluation",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    train = commands.add_parser("train", help="train a model")
    _add_data_args(train)
    train.add_argument("--signs", type=Path, help="sign-mask file (default: no constraints)")
    lam = train.add_mutually_exclusive_group(required=True)
    lam.add_argument("--lambda", dest="lam", type=float, help="regularization parameter")
    lam.add_argument("--lambda-over-n", type=float, help="set lambda to this value divided by n")
    _add_solver_args(train)
    train.add_argument("--points", type=int, default=None, help="log-schedule size")
    train.add_argument("--model", type=Path, required=True, help="output model JSON")
    train.add_argument("--trace", type=Path, help="output trace CSV (default: <model>.trace.csv)")
    train.add_argument(
        "--no-timing",
        action="store_true",
        help="write elapsed_ns as 0 for reproducible trace files",
    )

    predict = commands.add_parser("predict", help="score examples with a trained model")
    _add_data_args(predict)
    predict.add_argument("--model", type=Path, required=True, help="model JSON")
    predict.add_argument("--scores", type=Path, help="output scores file (default: stdout)")
    predict.add_argument("--auc", action="store_true", help="append the AUC against the labels")

    pairwise = commands.add_parser("pairwise", help="build SVM-pairwise features")
    pairwise.add_argument("--similarity", type=Path, required=True, help="n x n similarity CSV")
    pairwise.add_argument("--labels", type=Path, required=True, help="one label per sequence")
    pairwise.add_argument("--zero-one-labels", action="store_true")
    pairwise.add_argument("--data", type=Path, required=True, help="output dataset")
    pairwise.add_argument(
        "--format",
        type=DataFormat,
        choices=list(DataFormat),
        default=None,
    )
    pairwise.add_argument("--signs", type=Path, required=True, help="output sign-mask file")
    pairwise.add_argument("--index", type=Path, help="output id map (default: <data>.index)")

    evaluate = commands.add_parser("eval", help="holdout ROC evaluation")
    _add_data_args(evaluate, required=False)
    evaluate.add_argument("--signs", type=Path, help="sign-mask file")
    evaluate.add_argument("--similarity", type=Path, help="similarity CSV (pairwise comparison)")
    evaluate.add_argument("--labels", type=Path, help="labels for --similarity")
    lambdas = evaluate.add_mutually_exclusive_group()
    lambdas.add_argument("--lambda", dest="lam", type=float, nargs="+", help="candidate lambdas")
    lambdas.add_argument("--lambda-over-n", type=float, nargs="+", help="candidates times 1/n")
    _add_solver_args(evaluate)
    evaluate.add_argument("--folds", type=int, default=5, help="cross-validation folds")
    evaluate.add_argument("--repeats", type=int, default=10, help="splits for --similarity")
    evaluate.add_argument("--report", type=Path, help="output JSON reports")
    evaluate.add_argument("--roc", type=Path, help="output ROC points CSV")

    verify = commands.add_parser("verify", help="run the oracle checks")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument(
        "--check",
        type=CheckName,
        choices=list(CheckName),
        action="append",
        help="check to run (repeatable, default: all)",
    )
    verify.add_argument("--instances", type=int, default=20)
    verify.add_argument("--lambda", dest="lam", type=float, default=0.1)
    verify.add_argument("--epsilon", type=float, default=0.01)
    verify.add_argument("--grid-points", type=int, default=10**5)
    return parser


def _data_format(path: Path, fmt: Optional[DataFormat]) -> DataFormat:
    if fmt is not None:
        return fmt
    return DataFormat.DENSE if path.suffix == DataFormat.DENSE.suffix else DataFormat.SPARSE


def _load_training_data(args: argparse.Namespace) -> tuple[Dataset, SignMask]:
    fmt = _data_format(args.data, args.format)
    raw = load_dataset(args.data, fmt, zero_one_labels=args.zero_one_labels)
    if args.normalize:
        raw = normalize_unit(raw)
    pos, neg = load_sign_mask(args.signs) if args.signs else (set(), set())
    return apply_sign_mask(raw, pos, neg)


def _resolve_lambda(args: argparse.Namespace, n: int) -> float:
    lam = args.lam if args.lam is not None else args.lambda_over_n / n
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return float(lam)


def _max_iter(args: argparse.Namespace) -> int:
    return int(args.max_iter) if args.max_iter is not None else DEFAULT_MAX_ITER[args.solver]


def cmd_train(args: argparse.Namespace) -> int:
    """Train, then write the model JSON and the trace CSV."""
    data, mask = _load_training_data(args)
    lam = _resolve_lambda(args, data.n)
    max_iter = _max_iter(args)
    trace_path = args.trace or args.model.with_suffix(".trace.csv")

    if args.solver is SolverName.FW:
        result = fw_train(data, mask, FwConfig(lam=lam, epsilon=args.epsilon, max_iter=max_iter))
        model, trace = result.model, result.trace
        status = EXIT_OK if result.certified else EXIT_NOT_CERTIFIED
        summary = (
            f"fw: {result.iterations} iterations, P={result.primal:.10g} "
            f"D={result.dual:.10g} gap={result.gap:.3e} "
            f"{'certified' if result.certified else 'not certified'}"
        )
    else:
        schedule = make_schedule(args.eval_schedule, max_iter, args.points)
        cfg = PgConfig(lam=lam, max_iter=max_iter, eval_schedule=schedule, seed=args.seed)
        pg = pg_train(data, mask, cfg)
        model, trace = pg.model, pg.trace
        status = EXIT_OK
        summary = f"pg: {max_iter} iterations, best P={pg.best_primal:.10g} at {pg.best_iter}"

    save_model(model, args.model, data.fingerprint(), normalized=args.normalize)
    write_trace(trace, trace_path, include_timing=not args.no_timing)
    print(summary)
    if status == EXIT_NOT_CERTIFIED:
        message = f"not certified: gap above {args.epsilon:g} after {max_iter} iterations"
        print(message, file=sys.stderr)
    return status


def cmd_predict(args: argparse.Namespace) -> int:
    """Score every example of a dataset with a saved model."""
    record = load_model(args.model)
    model = record.to_model()
    fmt = _data_format(args.data, args.format)
    d = model.d if fmt is DataFormat.SPARSE else None
    raw = load_dataset(args.data, fmt, d=d, zero_one_labels=args.zero_one_labels)
    if raw.d != model.d:
        raise DimensionMismatchError("data", model.d, raw.d)
    if record.normalized:
        raw = normalize_unit(raw)

    mask = model.sign_mask
    data, _ = apply_sign_mask(raw, mask.original_pos_idx, mask.neg_idx)
    if data.fingerprint() != record.dataset_fingerprint:
        logger.warning("Data %s differs from the training data of %s", args.data, args.model)

    scores = model.decision_function(raw.features)
    score_auc = auc(scores, raw.labels) if args.auc else None
    if args.scores:
        write_scores(scores, args.scores, score_auc)
    else:
        for score in scores:
            print(repr(float(score)))
        if score_auc is not None:
            print(f"auc {score_auc!r}")
    return EXIT_OK


def cmd_pairwise(args: argparse.Namespace) -> int:
    """Write the positives-first pairwise dataset, its sign mask and the id map."""
    sim = load_similarity(args.similarity, args.labels, args.zero_one_labels)
    raw, mask, order = pairwise_raw(sim)
    write_dataset(raw, args.data, _data_format(args.data, args.format))
    write_sign_mask(mask, args.signs)
    index_path = args.index or args.data.with_suffix(".index")
    write_index_map(order, index_path)
    n_pos = int(np.sum(raw.labels == 1))
    print(f"pairwise: n={raw.n} ({n_pos} positive), wrote {args.data}, {args.signs}, {index_path}")
    return EXIT_OK


def _lambda_grid(args: argparse.Namespace, n: int) -> list[float]:
    if args.lam:
        return list(args.lam)
    if args.lambda_over_n:
        return [c / n for c in args.lambda_over_n]
    return default_lambda_grid(n)


def cmd_eval(args: argparse.Namespace) -> int:
    """Holdout evaluation on a dataset, or the repeated pairwise sign comparison."""
    spec = TrainSpec(
        solver=args.solver,
        epsilon=args.epsilon,
        max_iter=_max_iter(args),
        schedule=args.eval_schedule,
    )
    if args.similarity:
        if not args.labels:
            raise ValueError("--similarity needs --labels")
        sim = load_similarity(args.similarity, args.labels, args.zero_one_labels)
        lambdas = _lambda_grid(args, (sim.n + 1) // 2)
        comparison = compare_sign_constraints(
            sim, lambdas, args.repeats, spec, args.seed, args.folds, args.normalize
        )
        for variant, (mean, std) in comparison.summary().items():
            print(f"{variant}: mean AUC {mean:.4f} +/- {std:.4f}")
        if args.report:
            write_reports(comparison.constrained + comparison.unconstrained, args.report)
        return EXIT_OK

    if not args.data:
        raise ValueError("eval needs --data or --similarity")
    data, mask = _load_training_data(args)
    lambdas = _lambda_grid(args, (data.n + 1) // 2)
    holdout = evaluate_holdout(data, mask, lambdas, spec, args.seed, args.folds)
    report = holdout.report
    print(f"auc {report.auc:.6f} lambda {report.lam:.6g} ({report.n_pos}+/{report.n_neg}-)")
    if args.report:
        write_reports([report], args.report)
    if args.roc:
        fpr, tpr = roc_points(holdout.scores, holdout.labels)
        with open(args.roc, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(("fpr", "tpr"))
            writer.writerows(zip((repr(float(x)) for x in fpr), (repr(float(y)) for y in tpr)))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the oracle suite and print one line per check."""
    results = run_checks(
        seed=args.seed,
        checks=args.check,
        instances=args.instances,
        lam=args.lam,
        epsilon=args.epsilon,
        config=OracleConfig(grid_points=args.grid_points),
    )
    for result in results:
        print(result.describe())
    return EXIT_OK if all(r.passed for r in results) else EXIT_ERROR


COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "pairwise": cmd_pairwise,
    "eval": cmd_eval,
    "verify": cmd_verify,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    settings = get_settings()
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        with threadpool_limits(limits=settings.threads):
            return COMMANDS[args.command](args)
    except (ScsvmError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
