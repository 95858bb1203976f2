"""Pytest configuration and shared fixtures."""
import os
from pathlib import Path

import numpy as np
import pytest

# Set test environment variables before importing app modules
os.environ.setdefault("SCSVM_DEBUG_CHECKS", "true")
os.environ.setdefault("SCSVM_LOG_LEVEL", "WARNING")

from scsvm.config import get_settings
from scsvm.models import Dataset, RawDataset, SignMask
from scsvm.services.data_io import apply_sign_mask
from scsvm.services.synthetic import random_instance

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def fresh_settings():
    """Re-read settings for every test so monkeypatched env vars apply."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def small_instance(rng) -> tuple[Dataset, SignMask]:
    """Normalized random problem with mixed constraints (n=30, d=8)."""
    return random_instance(rng, 30, 8)


@pytest.fixture
def one_example() -> tuple[Dataset, SignMask]:
    """Single example x=[1] with label +1: P(w) = lam/2 w^2 + max(0, 1 - w)."""
    raw = RawDataset(features=np.array([[1.0]]), labels=np.array([1]))
    return apply_sign_mask(raw, [0], [])


@pytest.fixture
def data_dir() -> Path:
    """Directory with the bundled toy files."""
    return DATA_DIR


@pytest.fixture
def toy_files(tmp_path) -> dict[str, Path]:
    """Copies of the bundled toy files in a temporary directory."""
    files = {}
    for name in ("toy.svm", "toy_signs.txt", "toy_similarity.csv", "toy_labels.txt"):
        target = tmp_path / name
        target.write_text((DATA_DIR / name).read_text(encoding="utf-8"), encoding="utf-8")
        files[name] = target
    return files
