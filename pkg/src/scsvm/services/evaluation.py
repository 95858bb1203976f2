"""ROC scoring, seeded splits, cross-validation over lambda and the
sign-constraint comparison on SVM-pairwise data."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from sklearn.metrics import roc_auc_score, roc_curve
from sklearn.model_selection import StratifiedKFold, train_test_split

from scsvm.config import ScheduleKind, SolverName, get_settings
from scsvm.errors import ConfigError, DimensionMismatchError, SingleClassError
from scsvm.models import Dataset, EvalReport, PrimalModel, SignMask, SimilarityMatrix
from scsvm.services.data_io import (
    normalize_unit,
    pairwise_features,
    pairwise_raw,
    restrict_similarity,
)
from scsvm.services.fw_solver import FwConfig, fw_train
from scsvm.services.pg_solver import PgConfig, make_schedule, pg_train

logger = logging.getLogger(__name__)

# Regularization multipliers of 1/n used for the default lambda grid
LAMBDA_GRID_FACTORS = (1e-6, 1e-4, 1e-2, 1.0, 1e2)

DEFAULT_FOLDS = 5


@dataclass(frozen=True)
class TrainSpec:
    """Solver choice and budget for trainings run inside an evaluation."""

    solver: SolverName = SolverName.FW
    epsilon: float = 1e-3
    max_iter: int = 1000
    schedule: ScheduleKind = ScheduleKind.LOG

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be at least 1, got {self.max_iter}")


def train_model(data: Dataset, mask: SignMask, lam: float, spec: TrainSpec) -> PrimalModel:
    """Train with the solver named in spec and return the model."""
    if spec.solver is SolverName.FW:
        cfg = FwConfig(lam=lam, epsilon=spec.epsilon, max_iter=spec.max_iter)
        return fw_train(data, mask, cfg).model
    schedule = make_schedule(spec.schedule, spec.max_iter)
    pg_cfg = PgConfig(lam=lam, max_iter=spec.max_iter, eval_schedule=schedule)
    return pg_train(data, mask, pg_cfg).model


def _check_scores(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.shape != labels.shape:
        raise DimensionMismatchError("labels", scores.shape[0], labels.shape[0])
    n_pos = int(np.sum(labels == 1))
    if n_pos == 0 or n_pos == labels.shape[0]:
        raise SingleClassError("ROC score needs both positive and negative examples")
    return scores, labels


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Area under the ROC curve.

    Equals the probability that a random positive outscores a random
    negative, with ties counted as one half.
    """
    scores, labels = _check_scores(scores, labels)
    return float(roc_auc_score(labels, scores))


def roc_points(scores: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """ROC curve as (false positive rates, true positive rates)."""
    scores, labels = _check_scores(scores, labels)
    fpr, tpr, _ = roc_curve(labels, scores, drop_intermediate=False)
    return fpr, tpr


def default_lambda_grid(n: int) -> list[float]:
    """Candidate lambdas {1e-6, 1e-4, 1e-2, 1, 1e2} / n."""
    if n < 1:
        raise ConfigError(f"n must be positive, got {n}")
    return [factor / n for factor in LAMBDA_GRID_FACTORS]


def summarize(values: Sequence[float]) -> tuple[float, float]:
    """Mean and unbiased (ddof=1) standard deviation; stddev is NaN below two values."""
    array = np.asarray(values, dtype=np.float64)
    if array.size == 0:
        raise ValueError("nothing to summarize")
    std = float(np.std(array, ddof=1)) if array.size > 1 else math.nan
    return float(np.mean(array)), std


def split_half(labels: np.ndarray, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded stratified half/half split; returns sorted (train, test) indices."""
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    if min(n_pos, labels.shape[0] - n_pos) < 2:
        raise SingleClassError("each class needs at least two examples for a half split")
    train, test = train_test_split(
        np.arange(labels.shape[0]),
        test_size=0.5,
        stratify=labels,
        random_state=seed,
    )
    return np.sort(train), np.sort(test)


def stratified_folds(labels: np.ndarray, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Shuffled stratified k-fold (train, validation) index pairs."""
    if k < 2:
        raise ConfigError(f"need at least 2 folds, got {k}")
    labels = np.asarray(labels)
    n_pos = int(np.sum(labels == 1))
    if min(n_pos, labels.shape[0] - n_pos) < k:
        raise SingleClassError(
            f"{k} folds need at least {k} examples per class, got {n_pos} positive "
            f"and {labels.shape[0] - n_pos} negative"
        )
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return list(splitter.split(np.zeros(labels.shape[0]), labels))


@dataclass
class CrossValidation:
    """Mean validation AUC per candidate lambda and the winner."""

    lambdas: list[float]
    mean_auc: list[float]
    fold_auc: np.ndarray  # (len(lambdas), k)
    best_lambda: float = field(init=False)

    def __post_init__(self) -> None:
        # first maximum wins, so the order of the grid breaks ties
        self.best_lambda = self.lambdas[int(np.argmax(self.mean_auc))]


def cross_validate(
    data: Dataset,
    mask: SignMask,
    lambdas: Sequence[float],
    k: int = DEFAULT_FOLDS,
    spec: TrainSpec = TrainSpec(),
    seed: int = 0,
    workers: Optional[int] = None,
) -> CrossValidation:
    """Pick lambda by stratified k-fold cross-validation.

    Args:
        data: Training examples (preprocessed feature space)
        mask: Sign constraints
        lambdas: Candidate regularization values
        k: Number of folds
        spec: Solver used for every fold training
        seed: Fold shuffling seed
        workers: Concurrent fold trainings; defaults to the SCSVM_THREADS cap

    Returns:
        CrossValidation with per-lambda mean AUC and the best lambda
    """
    if not lambdas:
        raise ConfigError("need at least one lambda candidate")
    if any(not lam > 0 for lam in lambdas):
        raise ConfigError("every lambda must be positive")
    folds = stratified_folds(data.labels, k, seed)
    tasks = [(lam, train, val) for lam in lambdas for train, val in folds]

    def run(lam: float, train: np.ndarray, val: np.ndarray) -> float:
        model = train_model(data.subset(train), mask, lam, spec)
        held_out = data.subset(val)
        return auc(model.internal_scores(held_out.features()), held_out.labels)

    workers = workers or get_settings().max_workers
    logger.info(
        "Cross-validating %d lambdas over %d folds with %d workers", len(lambdas), k, workers
    )
    # fold trainings share the read-only dataset
    scores = Parallel(n_jobs=workers, prefer="threads")(
        delayed(run)(lam, train, val) for lam, train, val in tasks
    )
    fold_auc = np.asarray(scores).reshape(len(lambdas), k)
    result = CrossValidation(
        lambdas=list(lambdas),
        mean_auc=[float(x) for x in fold_auc.mean(axis=1)],
        fold_auc=fold_auc,
    )
    logger.info("Best lambda %.3g (mean AUC %.4f)", result.best_lambda, max(result.mean_auc))
    return result


def _select_lambda(
    data: Dataset,
    mask: SignMask,
    lambdas: Sequence[float],
    k: int,
    spec: TrainSpec,
    seed: int,
) -> float:
    if len(lambdas) == 1:
        return float(lambdas[0])
    return cross_validate(data, mask, lambdas, k, spec, seed).best_lambda


@dataclass
class Holdout:
    """Test-half scores of the model trained on the other half."""

    report: EvalReport
    scores: np.ndarray
    labels: np.ndarray
    test_index: np.ndarray


def evaluate_holdout(
    data: Dataset,
    mask: SignMask,
    lambdas: Sequence[float],
    spec: TrainSpec = TrainSpec(),
    seed: int = 0,
    k: int = DEFAULT_FOLDS,
) -> Holdout:
    """Half/half split, lambda by cross-validation on the training half, test AUC."""
    train, test = split_half(data.labels, seed)
    train_data, test_data = data.subset(train), data.subset(test)
    lam = _select_lambda(train_data, mask, lambdas, k, spec, seed)
    model = train_model(train_data, mask, lam, spec)
    scores = model.internal_scores(test_data.features())
    n_pos, n_neg = test_data.class_counts()
    report = EvalReport(
        auc=auc(scores, test_data.labels),
        n_pos=n_pos,
        n_neg=n_neg,
        lam=lam,
        seed=seed,
        constrained=bool(mask.pos_idx.size),
    )
    return Holdout(report=report, scores=scores, labels=test_data.labels, test_index=test)


@dataclass
class SignComparison:
    """Per-repeat test AUCs with and without the pairwise sign constraints."""

    constrained: list[EvalReport]
    unconstrained: list[EvalReport]

    def summary(self) -> dict[str, tuple[float, float]]:
        """Mean and stddev of the AUC for each variant."""
        return {
            "constrained": summarize([r.auc for r in self.constrained]),
            "unconstrained": summarize([r.auc for r in self.unconstrained]),
        }


def _pairwise_report(
    sim: SimilarityMatrix,
    train: np.ndarray,
    test: np.ndarray,
    constrained: bool,
    lambdas: Sequence[float],
    spec: TrainSpec,
    seed: int,
    k: int,
    normalize: bool,
) -> EvalReport:
    raw, mask, order = pairwise_raw(restrict_similarity(sim, train))
    if normalize:
        raw = normalize_unit(raw)
    if not constrained:
        mask = SignMask.unconstrained(raw.d)
    data = Dataset.from_features(mask.to_internal(raw.features), raw.labels)
    lam = _select_lambda(data, mask, lambdas, k, spec, seed)
    model = train_model(data, mask, lam, spec)

    queries = pairwise_features(sim, train[order], test, normalize)
    labels = sim.labels[test]
    return EvalReport(
        auc=auc(model.decision_function(queries), labels),
        n_pos=int(np.sum(labels == 1)),
        n_neg=int(np.sum(labels != 1)),
        lam=lam,
        seed=seed,
        constrained=constrained,
    )


def compare_sign_constraints(
    sim: SimilarityMatrix,
    lambdas: Sequence[float],
    repeats: int = 10,
    spec: TrainSpec = TrainSpec(),
    seed: int = 0,
    k: int = DEFAULT_FOLDS,
    normalize: bool = False,
) -> SignComparison:
    """Repeated half splits of the sequences, constrained vs unconstrained SVM-pairwise.

    Repeat r uses seed + r for its split and its folds. Features of both
    train and test sequences are similarities to the training sequences.
    """
    if repeats < 1:
        raise ConfigError(f"repeats must be positive, got {repeats}")
    constrained, unconstrained = [], []
    for r in range(repeats):
        train, test = split_half(sim.labels, seed + r)
        for flag, reports in ((True, constrained), (False, unconstrained)):
            report = _pairwise_report(sim, train, test, flag, lambdas, spec, seed + r, k, normalize)
            reports.append(report)
        logger.info(
            "Repeat %d: constrained AUC %.4f, unconstrained AUC %.4f",
            r, constrained[-1].auc, unconstrained[-1].auc,
        )
    return SignComparison(constrained=constrained, unconstrained=unconstrained)
