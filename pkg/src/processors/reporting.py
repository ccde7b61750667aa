"""
Reporting Module

================================================================================
PURPOSE
================================================================================
Run records and the files written for each solver run:

  <out>/<label>_errors.csv      t,numerical,exact,abs_error on the report grid
  <out>/<label>_solution.csv    t,numerical,exact on 101 points of the domain
  <out>/<label>_report.json     config echo, training report, errors, weights
  <out>/example<N>_sweep_errors.csv   alpha,t,abs_error (sweeps only)

Floats in CSVs use pandas' default formatting (shortest repr that round-trips),
so identical runs give byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from processors.benchmarks import max_abs_error
from processors.training import TrainReport

SWEEP_COLUMNS = ["alpha", "t", "abs_error"]


@dataclass
class RunRecord:
    """Everything known about one training run."""

    label: str
    config: Dict[str, Any]
    report: TrainReport
    errors: pd.DataFrame
    weights: List[float]
    wall_ms: float
    reported_iterations: Optional[int] = None
    outputs: Dict[str, str] = field(default_factory=dict)

    @property
    def max_abs_error(self) -> Optional[float]:
        return max_abs_error(self.errors)

    def summary_line(self) -> str:
        err = self.max_abs_error
        err_text = f"{err:.3e}" if err is not None else "n/a"
        return (
            f"{self.label}: {self.report.termination_reason.value}, "
            f"final cost {self.report.final_cost:.3e}, "
            f"{self.report.iterations} iterations, max abs error {err_text}"
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "config": self.config,
            "training": self.report.to_dict(),
            "reported_iterations": self.reported_iterations,
            "max_abs_error": self.max_abs_error,
            "errors": self.errors.to_dict(orient="records"),
            "weights": list(self.weights),
            "wall_ms": self.wall_ms,
            "outputs": dict(self.outputs),
        }


def write_csv(df: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, lineterminator="\n")
    return path


def write_report_json(record: RunRecord, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(record.to_dict(), f, indent=2)
        f.write("\n")
    return path


def sweep_frame(errors_by_alpha: Sequence[tuple[float, pd.DataFrame]]) -> pd.DataFrame:
    """Long-format alpha,t,abs_error table, ordered by alpha then t."""
    frames = [
        pd.DataFrame({"alpha": alpha, "t": table["t"], "abs_error": table["abs_error"]})
        for alpha, table in errors_by_alpha
        if "abs_error" in table.columns and not table.empty
    ]
    if not frames:
        return pd.DataFrame(columns=SWEEP_COLUMNS)
    out = pd.concat(frames, ignore_index=True)
    return out.sort_values(["alpha", "t"], kind="stable").reset_index(drop=True)[SWEEP_COLUMNS]
