import logging
from enum import Enum
from typing import Any, Iterable, List, Sequence

import numpy as np
import pandas as pd

from app.models.schemas import CommandReport, TableModel

logger = logging.getLogger(__name__)


def _plain(value: Any) -> Any:
    """numpy scalars and enums to JSON-friendly Python values."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def table(title: str, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> TableModel:
    rows = [[_plain(v) for v in row] for row in rows]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"table {title!r}: row {row} does not match columns {list(columns)}")
    return TableModel(title=title, columns=list(columns), rows=rows)


def to_frame(t: TableModel) -> pd.DataFrame:
    return pd.DataFrame(t.rows, columns=t.columns)


def _render_text(report: CommandReport) -> str:
    lines: List[str] = [f"{report.command}: {report.subject} [{report.status}]"]
    for key, value in report.summary.items():
        lines.append(f"  {key}: {value}")
    for t in report.tables:
        lines.append("")
        lines.append(t.title)
        if t.rows:
            lines.append(to_frame(t).to_string(index=False))
        else:
            lines.append("(empty)")
    if report.notes:
        lines.append("")
        lines.extend(f"note: {n}" for n in report.notes)
    return "\n".join(lines) + "\n"


def _render_tsv(report: CommandReport) -> str:
    parts = [f"# {report.command}\t{report.subject}\t{report.status}"]
    for key, value in report.summary.items():
        parts.append(f"# {key}\t{value}")
    for t in report.tables:
        parts.append(f"# {t.title}")
        parts.append(to_frame(t).to_csv(sep="\t", index=False).rstrip("\n"))
    return "\n".join(parts) + "\n"


def render(report: CommandReport, output_format: str = "text") -> str:
    """Serialize a report; column order is fixed by the table models so output is stable."""
    if output_format == "json":
        return report.model_dump_json(indent=2) + "\n"
    if output_format == "tsv":
        return _render_tsv(report)
    if output_format == "text":
        return _render_text(report)
    raise ValueError(f"unknown output format {output_format!r}")


def summary_value(value: Any) -> Any:
    return _plain(value)
