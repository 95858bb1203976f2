"""TraceRecord model for convergence traces."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

TRACE_COLUMNS = ("iter", "primal", "dual", "gap", "elapsed_ns")


@dataclass(frozen=True)
class TraceRecord:
    """Objective values recorded at one solver iteration."""

    iter: int
    primal: float
    dual: Optional[float] = None
    gap: Optional[float] = None
    elapsed_ns: int = 0

    def as_row(self) -> list[str]:
        """Render the record as CSV fields (absent values are empty)."""
        return [
            str(self.iter),
            repr(float(self.primal)),
            "" if self.dual is None else repr(float(self.dual)),
            "" if self.gap is None else repr(float(self.gap)),
            str(self.elapsed_ns),
        ]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> TraceRecord:
        """Create TraceRecord from a parsed CSV row."""
        return cls(
            iter=int(row["iter"]),
            primal=float(row["primal"]),
            dual=float(row["dual"]) if row.get("dual") else None,
            gap=float(row["gap"]) if row.get("gap") else None,
            elapsed_ns=int(row.get("elapsed_ns") or 0),
        )


def best_primal_curve(trace: list[TraceRecord]) -> list[float]:
    """Running minimum of the recorded primal objective values."""
    best = float("inf")
    curve = []
    for record in trace:
        best = min(best, record.primal)
        curve.append(best)
    return curve
