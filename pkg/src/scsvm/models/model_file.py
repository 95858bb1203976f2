"""ModelFile schema: the JSON form of a trained model."""
from __future__ import annotations

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from scsvm.config import SolverName
from scsvm.models.primal_model import PrimalModel, TrainingMeta
from scsvm.models.sign_mask import SignMask

SCHEMA_VERSION = 1


class ModelFile(BaseModel):
    """User-space weights plus everything needed to reproduce predictions."""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    schema_version: int = SCHEMA_VERSION
    weights: list[float]
    sigma: list[int]
    negated: list[int]
    lam: float = Field(alias="lambda", gt=0)
    solver: SolverName
    iterations: int = Field(ge=0)
    final_gap: Optional[float] = None
    certified: Optional[bool] = None
    normalized: bool = False
    dataset_fingerprint: str

    @model_validator(mode="after")
    def _check_lengths(self) -> ModelFile:
        d = len(self.weights)
        if len(self.sigma) != d or len(self.negated) != d:
            raise ValueError("weights, sigma and negated must have the same length")
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {self.schema_version}")
        return self

    @classmethod
    def from_model(
        cls,
        model: PrimalModel,
        fingerprint: str,
        normalized: bool = False,
    ) -> ModelFile:
        """Create ModelFile from a trained PrimalModel."""
        if model.meta.solver is None:
            raise ValueError("model has no solver recorded")
        return cls(
            weights=[float(x) for x in model.weights],
            sigma=[int(x) for x in model.sign_mask.sigma],
            negated=[int(x) for x in model.sign_mask.negated],
            lam=model.lam,
            solver=model.meta.solver,
            iterations=model.meta.iterations,
            final_gap=model.meta.final_gap,
            certified=model.meta.certified,
            normalized=normalized,
            dataset_fingerprint=fingerprint,
        )

    def to_model(self) -> PrimalModel:
        """Rebuild the PrimalModel (internal weights) from the file contents."""
        sigma = np.asarray(self.sigma, dtype=np.int8)
        negated = np.asarray(self.negated, dtype=np.int8)
        mask = SignMask(
            sigma=sigma,
            pos_idx=np.flatnonzero(sigma),
            neg_idx=np.flatnonzero(negated),
            negated=negated,
        )
        return PrimalModel(
            w=mask.to_internal(np.asarray(self.weights)),
            lam=self.lam,
            sign_mask=mask,
            meta=TrainingMeta(
                solver=self.solver,
                iterations=self.iterations,
                final_gap=self.final_gap,
                certified=self.certified,
            ),
        )
