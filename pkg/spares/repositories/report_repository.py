# spares/repositories/report_repository.py

import json
import math
import logging
from pathlib import Path
from typing import Any, Literal, Union

import numpy as np
import pandas as pd

from spares.schemas import CommandOutput, EmpiricalDistribution, ReportBundle, StateDistribution, TableRef
from spares.exceptions.custom_exceptions import InvalidParameterException

logger = logging.getLogger(__name__)

OutputFormat = Literal["json", "csv", "both"]

REPORT_SECTIONS = ("analysis", "simulation", "comparison", "optimization", "timings_ms")

def to_jsonable(value: Any) -> Any:
    """
    Plain-JSON view of report content: numpy scalars and arrays become Python
    values, and non-finite floats become the strings "inf", "-inf" and "nan".
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value

class ReportRepository:
    """
    Writes command reports into an output directory: report.json plus one CSV
    per table. CSV levels are ascending and floats use round-trip precision.
    """
    def __init__(self, out_dir: Union[str, Path], fmt: OutputFormat = "both"):
        self.out_dir = Path(out_dir)
        self.fmt = fmt
        logger.debug("ReportRepository initialized.")

    def write_table(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.out_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return path

    def write(self, bundle: ReportBundle, output: CommandOutput) -> ReportBundle:
        """
        Writes tables (csv/both) and report.json (json/both). Sections of
        `output` are merged under the bundle's own entries. Returns the bundle
        with its sections and table references filled in.
        """
        self.out_dir.mkdir(parents=True, exist_ok=True)
        refs = []
        for name, frame in output.tables.items():
            file = None
            if self.fmt in ("csv", "both"):
                file = self.write_table(name, frame).name
            refs.append(TableRef(name=name, file=file, units=output.units.get(name, "probability"),
                                 columns=[str(c) for c in frame.columns]))
        sections = {name: {**getattr(output, name), **getattr(bundle, name)} for name in REPORT_SECTIONS}
        bundle = bundle.model_copy(update={**sections, "tables": refs})

        if self.fmt in ("json", "both"):
            path = self.out_dir / "report.json"
            path.write_text(json.dumps(to_jsonable(bundle.model_dump()), indent=2, allow_nan=False) + "\n",
                            encoding="utf-8")
        logger.info(f"Report for '{bundle.command}' written to {self.out_dir} ({len(refs)} table(s), format {self.fmt})")
        return bundle

def load_distribution_csv(path: Union[str, Path]) -> Union[StateDistribution, EmpiricalDistribution]:
    """
    Reads a distribution table back. Histogram tables (with a `count` column)
    become EmpiricalDistribution, probability tables become StateDistribution.
    """
    frame = pd.read_csv(path, float_precision="round_trip")
    if "level" not in frame.columns:
        raise InvalidParameterException(f"Table '{path}' has no 'level' column.")
    frame = frame.sort_values("level")
    if not np.array_equal(frame["level"].to_numpy(), np.arange(len(frame))):
        raise InvalidParameterException(f"Table '{path}' must list every level from 0 upward exactly once.")
    if "count" in frame.columns:
        return EmpiricalDistribution.from_ascending_counts(frame["count"].to_numpy(), "per-step")
    column = "probability" if "probability" in frame.columns else "analytic"
    return StateDistribution(probs=frame[column].to_numpy()[::-1])
