"""Model, trace and score files.

Models are JSON (ModelFile schema), traces CSV with the stable header
iter,primal,dual,gap,elapsed_ns, scores one float per line.
"""
from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import ValidationError

from scsvm.errors import DataFileNotFoundError, DatasetFormatError
from scsvm.models import EvalReport, ModelFile, PrimalModel, TraceRecord
from scsvm.models.trace import TRACE_COLUMNS

logger = logging.getLogger(__name__)


def save_model(
    model: PrimalModel,
    path: Path | str,
    fingerprint: str,
    normalized: bool = False,
) -> ModelFile:
    """Write a trained model as JSON and return the stored record."""
    record = ModelFile.from_model(model, fingerprint, normalized)
    Path(path).write_text(record.model_dump_json(by_alias=True, indent=2) + "\n", encoding="utf-8")
    logger.info("Saved model to %s", path)
    return record


def load_model(path: Path | str) -> ModelFile:
    """Read and validate a model JSON file."""
    path = Path(path)
    if not path.is_file():
        raise DataFileNotFoundError(path)
    try:
        return ModelFile.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise DatasetFormatError(path, None, f"invalid model file: {exc}") from None


def write_trace(
    trace: list[TraceRecord],
    path: Path | str,
    include_timing: bool = True,
) -> None:
    """Write a convergence trace as CSV.

    With include_timing=False the elapsed_ns column is written as 0 so that
    identical runs give byte-identical files.
    """
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        for record in trace:
            row = record.as_row()
            if not include_timing:
                row[-1] = "0"
            writer.writerow(row)


def read_trace(path: Path | str) -> list[TraceRecord]:
    """Read a trace CSV written by write_trace."""
    path = Path(path)
    if not path.is_file():
        raise DataFileNotFoundError(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise DatasetFormatError(path, 1, f"expected header {','.join(TRACE_COLUMNS)}")
        records = []
        for line_num, row in enumerate(reader, 2):
            try:
                records.append(TraceRecord.from_row(row))
            except (TypeError, ValueError) as exc:
                raise DatasetFormatError(path, line_num, str(exc)) from None
    return records


@dataclass(frozen=True)
class ObjectiveError:
    """Distance of one trace row from a reference optimum."""

    iter: int
    primal_error: float
    dual_error: Optional[float] = None
    gap: Optional[float] = None


def objective_errors(
    trace: list[TraceRecord],
    p_star: float,
    d_star: Optional[float] = None,
) -> list[ObjectiveError]:
    """Convert a trace into P - P* (and D* - D where the dual was recorded).

    Args:
        trace: Solver trace
        p_star: Reference primal optimum
        d_star: Reference dual optimum; defaults to p_star

    Returns:
        One ObjectiveError per trace row
    """
    d_star = p_star if d_star is None else d_star
    return [
        ObjectiveError(
            iter=record.iter,
            primal_error=record.primal - p_star,
            dual_error=None if record.dual is None else d_star - record.dual,
            gap=record.gap,
        )
        for record in trace
    ]


def write_scores(scores: np.ndarray, path: Path | str, auc: Optional[float] = None) -> None:
    """Write one score per line, optionally followed by an `auc <value>` line."""
    lines = [repr(float(s)) for s in np.asarray(scores, dtype=np.float64)]
    if auc is not None:
        lines.append(f"auc {float(auc)!r}")
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_scores(path: Path | str) -> tuple[np.ndarray, Optional[float]]:
    """Read a scores file; returns (scores, auc or None)."""
    path = Path(path)
    if not path.is_file():
        raise DataFileNotFoundError(path)
    scores = []
    auc = None
    for line_num, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        text = line.strip()
        if not text:
            continue
        try:
            if text.startswith("auc "):
                auc = float(text.split()[1])
            else:
                scores.append(float(text))
        except ValueError:
            raise DatasetFormatError(path, line_num, f"bad score {text!r}") from None
    return np.asarray(scores, dtype=np.float64), auc


def write_index_map(order: np.ndarray, path: Path | str) -> None:
    """Write `<position> <original id>` lines for a reordering."""
    lines = [f"{j} {int(i)}" for j, i in enumerate(order)]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def read_index_map(path: Path | str) -> np.ndarray:
    """Read an id-mapping file back into the order array."""
    path = Path(path)
    if not path.is_file():
        raise DataFileNotFoundError(path)
    pairs = []
    for line_num, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            position, original = (int(x) for x in line.split())
        except ValueError:
            message = f"expected '<position> <id>', got {line!r}"
            raise DatasetFormatError(path, line_num, message) from None
        pairs.append((position, original))
    pairs.sort()
    if [p for p, _ in pairs] != list(range(len(pairs))):
        raise DatasetFormatError(path, None, "positions must be 0..n-1")
    return np.asarray([o for _, o in pairs], dtype=np.int64)


def write_reports(reports: list[EvalReport], path: Path | str) -> None:
    """Write evaluation reports as a JSON list of records."""
    payload = [report.to_record() for report in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def read_reports(path: Path | str) -> list[EvalReport]:
    """Read reports written by write_reports."""
    path = Path(path)
    if not path.is_file():
        raise DataFileNotFoundError(path)
    return [EvalReport.from_record(r) for r in json.loads(path.read_text(encoding="utf-8"))]
