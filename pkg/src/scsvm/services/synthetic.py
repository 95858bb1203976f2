"""Seeded problem generators for tests, the verify command and benchmarks."""
from __future__ import annotations

import numpy as np
from sklearn.datasets import load_digits
from sklearn.metrics.pairwise import rbf_kernel

from scsvm.models import Dataset, RawDataset, SignMask, SimilarityMatrix
from scsvm.services.data_io import apply_sign_mask, normalize_unit

# Label noise for random instances
LABEL_NOISE = 0.3


def random_raw(rng: np.random.Generator, n: int, d: int, normalize: bool = True) -> RawDataset:
    """Gaussian features labelled by a random hyperplane plus noise; both classes present."""
    features = rng.standard_normal((n, d))
    if normalize:
        features /= np.linalg.norm(features, axis=1, keepdims=True)
    w_true = rng.standard_normal(d)
    scores = features @ w_true + LABEL_NOISE * rng.standard_normal(n)
    labels = np.where(scores >= 0.0, 1, -1)
    if n >= 2 and np.all(labels == labels[0]):
        labels[rng.integers(n)] = -labels[0]
    return RawDataset(features=features, labels=labels)


def random_signs(
    rng: np.random.Generator,
    d: int,
    constrained_fraction: float = 0.5,
) -> tuple[list[int], list[int]]:
    """Random original (non-negative, non-positive) index sets."""
    constrained = np.flatnonzero(rng.random(d) < constrained_fraction)
    negative = rng.random(constrained.shape[0]) < 0.5
    return constrained[~negative].tolist(), constrained[negative].tolist()


def random_instance(
    rng: np.random.Generator,
    n: int,
    d: int,
    constrained_fraction: float = 0.5,
    normalize: bool = True,
) -> tuple[Dataset, SignMask]:
    """Random training problem with a mix of free, non-negative and non-positive weights."""
    raw = random_raw(rng, n, d, normalize)
    pos, neg = random_signs(rng, d, constrained_fraction)
    return apply_sign_mask(raw, pos, neg)


def random_alpha(rng: np.random.Generator, n: int, corner_fraction: float = 0.3) -> np.ndarray:
    """Dual point in the box with some coordinates pinned to exactly 0 or 1."""
    alpha = rng.random(n)
    pinned = rng.random(n) < corner_fraction
    alpha[pinned] = rng.integers(0, 2, size=int(pinned.sum()))
    return alpha


def two_blob_similarity(
    rng: np.random.Generator,
    n_pos: int,
    n_neg: int,
    dim: int = 5,
    separation: float = 1.0,
) -> SimilarityMatrix:
    """Gaussian-kernel similarities between points from two shifted Gaussian blobs.

    Sequences are shuffled so the classes are interleaved. The kernel width
    is n / sum ||p_i||^2.
    """
    center = np.zeros(dim)
    center[0] = separation
    points = np.vstack((
        rng.standard_normal((n_pos, dim)) + center,
        rng.standard_normal((n_neg, dim)) - center,
    ))
    labels = np.concatenate((np.ones(n_pos, dtype=np.int64), -np.ones(n_neg, dtype=np.int64)))
    perm = rng.permutation(n_pos + n_neg)
    points, labels = points[perm], labels[perm]
    gamma = points.shape[0] / float(np.sum(points * points))
    return SimilarityMatrix(values=rbf_kernel(points, gamma=gamma), labels=labels)


def digits_raw(max_examples: int | None = None, seed: int = 0) -> RawDataset:
    """Bundled 8x8 digits, odd (+1) against even (-1), unit-normalized."""
    features, digits = load_digits(return_X_y=True)
    labels = np.where(digits % 2 == 1, 1, -1)
    if max_examples is not None and max_examples < labels.shape[0]:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(labels.shape[0], max_examples, replace=False))
        features, labels = features[keep], labels[keep]
    return normalize_unit(RawDataset(features=features.astype(np.float64), labels=labels))


def digits_problem(max_examples: int | None = None, seed: int = 0) -> tuple[Dataset, SignMask]:
    """Unconstrained training problem on digits_raw."""
    raw = digits_raw(max_examples, seed)
    return apply_sign_mask(raw, (), ())
