"""Result table writer (CSV or JSON) with a header written once and rows in order."""
import csv
import io
import json
import math
import os
from logging import getLogger
from typing import Dict, List, Optional, Sequence

logger = getLogger(__name__)

FLOAT_FORMAT = "{:.17g}"


def format_value(value) -> str:
    """CSV cell text; floats keep 17 significant digits, None is an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return FLOAT_FORMAT.format(value)
    return str(value)


def _json_value(value):
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


class ResultWriter:
    """Writes rows with a fixed column list to ``path`` (stdout when path is None)."""

    def __init__(self, columns: Sequence[str], path: Optional[str] = None, fmt: str = "csv"):
        if fmt not in ("csv", "json"):
            raise ValueError(f"unknown output format '{fmt}'")
        self.columns = list(columns)
        self.path = path
        self.fmt = fmt
        self._rows: List[Dict[str, object]] = []

    def add(self, row: Dict[str, object]) -> None:
        self._rows.append(row)

    def render(self) -> str:
        if self.fmt == "json":
            doc = {"columns": self.columns,
                   "rows": [{c: _json_value(r.get(c)) for c in self.columns} for r in self._rows]}
            return json.dumps(doc, sort_keys=True, indent=2) + "\n"
        buffer = io.StringIO()
        out = csv.writer(buffer, lineterminator="\n")
        out.writerow(self.columns)
        for r in self._rows:
            out.writerow([format_value(r.get(c)) for c in self.columns])
        return buffer.getvalue()

    def write(self) -> str:
        """Write the table; returns the rendered text."""
        text = self.render()
        if self.path is None:
            return text
        directory = os.path.dirname(os.path.abspath(self.path))
        os.makedirs(directory, exist_ok=True)
        with open(self.path, "w", newline="", encoding="utf-8") as f:
            f.write(text)
        logger.info(f"wrote {len(self._rows)} rows to {self.path}")
        return text


def read_csv(path: str) -> List[Dict[str, str]]:
    """Rows of a CSV result file as dicts of strings."""
    with open(path, "r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))
