"""Dataset ingestion, sign-mask handling and the SVM-pairwise feature builder.

File formats:
- sparse: `<label> <idx>:<val> ...` per line, 1-based indices (svmlight)
- dense: CSV with header `label,f0,f1,...`
- sign mask: one `<index> <+|->` line per constrained feature, 0-based
- similarity: n header-less rows of n floats, labels in a separate file
"""
from __future__ import annotations

import io
import logging
import math
from collections.abc import Iterator
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from sklearn.datasets import dump_svmlight_file, load_svmlight_file

from scsvm.config import DataFormat
from scsvm.errors import DataFileNotFoundError, DatasetFormatError, SingleClassError
from scsvm.models import Dataset, RawDataset, SignMask, SimilarityMatrix

logger = logging.getLogger(__name__)


def _require_file(path: Path | str) -> Path:
    path = Path(path)
    if not path.is_file():
        raise DataFileNotFoundError(path)
    return path


def _content_lines(path: Path) -> Iterator[tuple[int, str]]:
    """Yield (line number, text) for non-blank, non-comment lines."""
    with open(path, "r", encoding="utf-8") as f:
        for line_num, line in enumerate(f, 1):
            text = line.split("#", 1)[0].strip()
            if text:
                yield line_num, text


def _map_label(value: float, zero_one: bool) -> Optional[int]:
    if zero_one:
        return {0.0: -1, 1.0: 1}.get(value)
    return {-1.0: -1, 1.0: 1}.get(value)


def _validate_sparse(path: Path, d: Optional[int], zero_one: bool) -> list[str]:
    """Check every sparse line, returning the cleaned example lines."""
    lines = []
    for line_num, text in _content_lines(path):
        tokens = text.split()
        try:
            label = float(tokens[0])
        except ValueError:
            raise DatasetFormatError(path, line_num, f"bad label {tokens[0]!r}") from None
        if _map_label(label, zero_one) is None:
            expected = "0 or 1" if zero_one else "-1 or +1"
            raise DatasetFormatError(path, line_num, f"label {tokens[0]} is not {expected}")
        previous = 0
        for token in tokens[1:]:
            index, sep, value = token.partition(":")
            try:
                position = int(index)
                number = float(value)
            except ValueError:
                raise DatasetFormatError(path, line_num, f"malformed feature {token!r}") from None
            if not sep or not math.isfinite(number):
                raise DatasetFormatError(path, line_num, f"malformed feature {token!r}")
            if position < 1:
                raise DatasetFormatError(path, line_num, f"feature index {position} below 1")
            if d is not None and position > d:
                raise DatasetFormatError(
                    path, line_num, f"feature index {position} exceeds d={d}"
                )
            if position <= previous:
                raise DatasetFormatError(path, line_num, "feature indices must increase")
            previous = position
        lines.append(text)
    if not lines:
        raise DatasetFormatError(path, None, "no examples")
    return lines


def _load_sparse(path: Path, d: Optional[int], zero_one: bool) -> RawDataset:
    lines = _validate_sparse(path, d, zero_one)
    content = io.BytesIO("\n".join(lines).encode("utf-8"))
    X, y = load_svmlight_file(content, n_features=d, zero_based=False, dtype=np.float64)
    labels = np.array([_map_label(float(v), zero_one) for v in y], dtype=np.int64)
    return RawDataset(features=X.toarray(), labels=labels)


def _load_dense(path: Path, d: Optional[int], zero_one: bool) -> RawDataset:
    try:
        frame = pd.read_csv(path, comment="#", skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(path, None, "no examples") from None
    except pd.errors.ParserError as exc:
        raise DatasetFormatError(path, None, str(exc)) from None
    if frame.columns.empty or frame.columns[0] != "label":
        raise DatasetFormatError(path, 1, "header must start with 'label'")
    if frame.empty:
        raise DatasetFormatError(path, None, "no examples")
    if d is not None and frame.shape[1] - 1 != d:
        message = f"expected {d} feature columns, got {frame.shape[1] - 1}"
        raise DatasetFormatError(path, 1, message)

    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows = np.flatnonzero(numeric.isna().any(axis=1).to_numpy())
    if bad_rows.size:
        # header is line 1
        raise DatasetFormatError(path, int(bad_rows[0]) + 2, "non-numeric or missing value")
    labels = []
    for row, value in enumerate(numeric["label"].to_numpy(dtype=np.float64)):
        mapped = _map_label(float(value), zero_one)
        if mapped is None:
            raise DatasetFormatError(path, row + 2, f"invalid label {value:g}")
        labels.append(mapped)
    features = numeric.drop(columns="label").to_numpy(dtype=np.float64)
    return RawDataset(features=features, labels=np.asarray(labels, dtype=np.int64))


def load_dataset(
    path: Path | str,
    fmt: DataFormat = DataFormat.SPARSE,
    d: Optional[int] = None,
    zero_one_labels: bool = False,
) -> RawDataset:
    """Load and validate a dataset file.

    Args:
        path: File to read
        fmt: sparse (svmlight) or dense (CSV with a label column)
        d: Declared feature count; inferred when None
        zero_one_labels: Map labels 0/1 to -1/+1

    Returns:
        RawDataset with labels in {-1, +1}
    """
    path = _require_file(path)
    if fmt is DataFormat.SPARSE:
        raw = _load_sparse(path, d, zero_one_labels)
    else:
        raw = _load_dense(path, d, zero_one_labels)
    logger.info("Loaded %s: n=%d d=%d", path, raw.n, raw.d)
    return raw


def write_dataset(raw: RawDataset, path: Path | str, fmt: DataFormat = DataFormat.SPARSE) -> None:
    """Write a dataset in the given format."""
    path = Path(path)
    if fmt is DataFormat.SPARSE:
        dump_svmlight_file(raw.features, raw.labels, str(path), zero_based=False)
        return
    frame = pd.DataFrame(raw.features, columns=[f"f{h}" for h in range(raw.d)])
    frame.insert(0, "label", raw.labels)
    frame.to_csv(path, index=False, float_format="%.17g")


def normalize_rows(features: np.ndarray, row_ids: Optional[np.ndarray] = None) -> np.ndarray:
    """Scale every row to unit Euclidean norm.

    row_ids names the rows in the error for an all-zero row (default: position).
    """
    norms = np.linalg.norm(features, axis=1)
    zero_rows = np.flatnonzero(norms == 0.0)
    if zero_rows.size:
        row = int(zero_rows[0]) if row_ids is None else int(np.asarray(row_ids)[zero_rows[0]])
        raise ValueError(f"cannot normalize all-zero example at row {row}")
    return features / norms[:, None]


def normalize_unit(raw: RawDataset) -> RawDataset:
    """Scale every example to unit Euclidean norm (so R = 1)."""
    return RawDataset(features=normalize_rows(raw.features), labels=raw.labels)


def apply_sign_mask(
    raw: RawDataset,
    pos: set[int] | list[int],
    neg: set[int] | list[int],
) -> tuple[Dataset, SignMask]:
    """Negate the non-positive features and build the training matrix.

    Args:
        raw: Examples in the user's feature space
        pos: Features whose weights must be non-negative
        neg: Features whose weights must be non-positive

    Returns:
        (Dataset with columns y_i x_i in the internal space, SignMask)
    """
    mask = SignMask.from_sets(raw.d, pos, neg)
    features = mask.to_internal(raw.features)
    return Dataset.from_features(features, raw.labels), mask


def load_sign_mask(path: Path | str) -> tuple[set[int], set[int]]:
    """Read a sign-mask file into (non-negative set, non-positive set)."""
    path = _require_file(path)
    pos: set[int] = set()
    neg: set[int] = set()
    for line_num, text in _content_lines(path):
        tokens = text.split()
        if len(tokens) != 2 or tokens[1] not in ("+", "-"):
            raise DatasetFormatError(path, line_num, f"expected '<index> <+|->', got {text!r}")
        try:
            index = int(tokens[0])
        except ValueError:
            raise DatasetFormatError(path, line_num, f"bad index {tokens[0]!r}") from None
        if index < 0:
            raise DatasetFormatError(path, line_num, f"negative index {index}")
        (pos if tokens[1] == "+" else neg).add(index)
    return pos, neg


def write_sign_mask(mask: SignMask, path: Path | str) -> None:
    """Write the original constraint signs of a mask."""
    lines = [f"{h} {'-' if mask.negated[h] else '+'}" for h in mask.pos_idx]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")


def load_labels(path: Path | str, zero_one: bool = False) -> np.ndarray:
    """Read one label per line."""
    path = _require_file(path)
    labels = []
    for line_num, text in _content_lines(path):
        try:
            mapped = _map_label(float(text), zero_one)
        except ValueError:
            mapped = None
        if mapped is None:
            raise DatasetFormatError(path, line_num, f"invalid label {text!r}")
        labels.append(mapped)
    if not labels:
        raise DatasetFormatError(path, None, "no labels")
    return np.asarray(labels, dtype=np.int64)


def load_similarity(
    path: Path | str,
    labels_path: Path | str,
    zero_one_labels: bool = False,
) -> SimilarityMatrix:
    """Read a header-less square similarity CSV and its label file."""
    path = _require_file(path)
    labels = load_labels(labels_path, zero_one_labels)
    try:
        frame = pd.read_csv(path, header=None)
    except pd.errors.EmptyDataError:
        raise DatasetFormatError(path, None, "empty similarity matrix") from None
    except pd.errors.ParserError as exc:
        raise DatasetFormatError(path, None, str(exc)) from None
    numeric = frame.apply(pd.to_numeric, errors="coerce")
    bad_rows = np.flatnonzero(numeric.isna().any(axis=1).to_numpy())
    if bad_rows.size:
        raise DatasetFormatError(path, int(bad_rows[0]) + 1, "non-numeric or missing value")
    values = numeric.to_numpy(dtype=np.float64)
    if values.shape[0] != values.shape[1]:
        raise DatasetFormatError(path, None, f"similarity matrix is not square: {values.shape}")
    if labels.shape[0] != values.shape[0]:
        raise DatasetFormatError(
            labels_path, None, f"{labels.shape[0]} labels for {values.shape[0]} sequences"
        )
    return SimilarityMatrix(values=values, labels=labels)


def positives_first(labels: np.ndarray) -> np.ndarray:
    """Stable ordering that puts every positive example before the negatives."""
    labels = np.asarray(labels)
    return np.concatenate((np.flatnonzero(labels == 1), np.flatnonzero(labels != 1)))


def pairwise_raw(sim: SimilarityMatrix) -> tuple[RawDataset, SignMask, np.ndarray]:
    """Positives-first SVM-pairwise examples in the user's feature space.

    Returns:
        (raw examples, sign mask with the positive features '+' and the
        negative features '-', order such that example j is sequence order[j])
    """
    if sim.n < 2:
        raise SingleClassError("SVM-pairwise needs at least two sequences")
    n_pos = int(np.sum(sim.labels == 1))
    if n_pos == 0 or n_pos == sim.n:
        raise SingleClassError(f"SVM-pairwise needs both classes, got {n_pos} of {sim.n} positive")
    order = positives_first(sim.labels)
    block = sim.values[np.ix_(order, order)]
    # Example j is column j of the reordered matrix: similarities of j to every sequence
    raw = RawDataset(features=block.T, labels=sim.labels[order])
    mask = SignMask.from_sets(sim.n, range(n_pos), range(n_pos, sim.n))
    return raw, mask, order


def build_pairwise(sim: SimilarityMatrix) -> tuple[Dataset, SignMask]:
    """SVM-pairwise training problem with the natural sign constraints.

    Feature h is the similarity to training sequence h (positives first), so
    the weights of positive sequences are constrained non-negative and those
    of negative sequences non-positive. The reordering is kept in
    Dataset.source_index.
    """
    raw, mask, order = pairwise_raw(sim)
    features = mask.to_internal(raw.features)
    data = Dataset.from_features(features, raw.labels, source_index=order)
    return data, mask


def pairwise_features(
    sim: SimilarityMatrix,
    train_order: np.ndarray,
    query_index: np.ndarray,
    normalize: bool = False,
) -> np.ndarray:
    """User-space features of query sequences against ordered training sequences.

    With normalize, rows are scaled like normalize_unit; a query with no
    similarity to any training sequence is rejected by its sequence id.
    """
    query_index = np.asarray(query_index)
    queries = sim.values[np.ix_(query_index, np.asarray(train_order))]
    return normalize_rows(queries, query_index) if normalize else queries


def restrict_similarity(sim: SimilarityMatrix, index: np.ndarray) -> SimilarityMatrix:
    """Sub-matrix over a subset of sequences."""
    index = np.asarray(index)
    return SimilarityMatrix(values=sim.values[np.ix_(index, index)], labels=sim.labels[index])
