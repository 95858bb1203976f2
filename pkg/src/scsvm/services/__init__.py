"""Training, evaluation and I/O services."""
from scsvm.services.objectives import (
    duality_gap,
    dual_objective,
    primal_objective,
    primal_subgradient,
    project_ball,
    project_sign_cone,
    recover_weights,
)
from scsvm.services.fw_solver import FwConfig, FwResult, fw_train, lmo
from scsvm.services.pg_solver import PgConfig, PgResult, log_schedule, pg_train
from scsvm.services.line_search import exact_line_search
from scsvm.services.data_io import apply_sign_mask, build_pairwise, load_dataset, normalize_unit
from scsvm.services.evaluation import auc, cross_validate, TrainSpec

__all__ = [
    "duality_gap",
    "dual_objective",
    "primal_objective",
    "primal_subgradient",
    "project_ball",
    "project_sign_cone",
    "recover_weights",
    "FwConfig",
    "FwResult",
    "fw_train",
    "lmo",
    "PgConfig",
    "PgResult",
    "log_schedule",
    "pg_train",
    "exact_line_search",
    "apply_sign_mask",
    "build_pairwise",
    "load_dataset",
    "normalize_unit",
    "auc",
    "cross_validate",
    "TrainSpec",
]
