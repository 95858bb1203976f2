"""Domain models for sign-constrained SVM training."""
from scsvm.models.dataset import Dataset, RawDataset, SimilarityMatrix
from scsvm.models.dual_state import DualState
from scsvm.models.eval_report import EvalReport
from scsvm.models.model_file import ModelFile
from scsvm.models.primal_model import PrimalModel, TrainingMeta
from scsvm.models.sign_mask import SignMask
from scsvm.models.trace import TraceRecord

__all__ = [
    "Dataset",
    "RawDataset",
    "SimilarityMatrix",
    "DualState",
    "EvalReport",
    "ModelFile",
    "PrimalModel",
    "TrainingMeta",
    "SignMask",
    "TraceRecord",
]
