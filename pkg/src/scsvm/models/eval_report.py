"""EvalReport model for ROC-score evaluations."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Any, Optional


@dataclass(frozen=True)
class EvalReport:
    """Test-set ROC score of one trained model."""

    auc: float
    n_pos: int
    n_neg: int
    lam: float
    seed: int
    constrained: Optional[bool] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.auc <= 1.0:
            raise ValueError(f"auc must lie in [0, 1], got {self.auc}")

    def to_record(self) -> dict[str, Any]:
        """JSON-ready record; lambda is spelled out."""
        record = asdict(self)
        record["lambda"] = record.pop("lam")
        return record

    @classmethod
    def from_record(cls, record: dict[str, Any]) -> EvalReport:
        """Create EvalReport from a JSON record."""
        return cls(
            auc=float(record["auc"]),
            n_pos=int(record["n_pos"]),
            n_neg=int(record["n_neg"]),
            lam=float(record["lambda"]),
            seed=int(record["seed"]),
            constrained=record.get("constrained"),
        )
