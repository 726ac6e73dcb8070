"""Run records and their CSV / JSON serialization.

Floats are written with 17 significant digits, which round-trips every
double exactly.  The JSON writer is a small deterministic serializer: the
same record always produces the same bytes, and a written file parsed with
:func:`json.loads` and re-serialized reproduces itself byte for byte.
Wall-clock time is kept on the record but never written, so that identical
configurations give identical files.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

STATS_COLUMNS = ("t", "mean", "sigma", "sigma2", "p0", "total_prob")
SNAPSHOT_COLUMNS = ("t", "n", "p", "pu", "pd")
CONTINUUM_COLUMNS = ("tau", "xi", "p")
SIGMA2_COLUMNS = ("tau", "sigma2")
DIFF_COLUMNS = ("t", "max_abs_dp")
COMPARISON_COLUMNS = ("t", "l1", "exact_peak_left", "exact_peak_right",
                      "continuum_peak_left", "continuum_peak_right")


@dataclass
class Table:
    columns: tuple
    rows: list = field(default_factory=list)

    def column(self, name: str) -> list:
        k = self.columns.index(name)
        return [row[k] for row in self.rows]


@dataclass
class RunRecord:
    name: str
    config: dict
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    version: str = ""
    wall_time: float = 0.0

    def as_data(self) -> dict:
        return {
            "name": self.name,
            "version": self.version,
            "config": self.config,
            "summary": self.summary,
            "tables": {key: {"columns": list(t.columns), "rows": [list(r) for r in t.rows]}
                       for key, t in self.tables.items()},
        }


def format_float(x: float) -> str:
    return "%.17g" % x


def _json_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format_float(x)
    # keep floats recognisable as floats after a parse / re-dump cycle
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def to_json(obj) -> str:
    """Deterministic JSON text for dicts, lists, strings, numbers, bools and None."""
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _json_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return to_json(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return format_float(value)
    if hasattr(value, "item"):
        return _csv_cell(value.item())
    return str(value)


def table_csv(table: Table) -> str:
    lines = [",".join(table.columns)]
    lines.extend(",".join(_csv_cell(v) for v in row) for row in table.rows)
    return "\n".join(lines) + "\n"


def write_output(record: RunRecord, out_dir, fmt: str = "csv") -> list[Path]:
    """Write one record; returns the paths created.

    ``csv``: one ``<name>_<table>.csv`` per table plus ``<name>_summary.json``
    holding the configuration echo and summary.  ``json``: a single
    ``<name>.json`` with everything.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt == "json":
        path = out_dir / f"{record.name}.json"
        path.write_text(to_json(record.as_data()) + "\n", encoding="utf-8")
        return [path]
    for key, table in record.tables.items():
        path = out_dir / f"{record.name}_{key}.csv"
        path.write_text(table_csv(table), encoding="utf-8")
        written.append(path)
    meta = {"name": record.name, "version": record.version, "config": record.config,
            "summary": record.summary}
    path = out_dir / f"{record.name}_summary.json"
    path.write_text(to_json(meta) + "\n", encoding="utf-8")
    written.append(path)
    return written
