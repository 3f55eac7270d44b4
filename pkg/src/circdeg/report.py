"""Scan configuration parsing and report serialization (CSV / JSON).

The config file is a single JSON object, for example::

    {"families": ["power:d=1"], "regime": "op53", "delta_grid": [1.0],
     "N": 1024, "tol": 1e-4}
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, ValidationError
from .powers import SQRT3
from .verify import FamilySpec, ScanReport

__all__ = [
    "ScanConfig",
    "CSV_HEADER",
    "parse_config",
    "load_config",
    "report_rows",
    "render_csv",
    "render_json",
    "read_report",
    "write_atomic",
]

CSV_HEADER = ("family", "params", "regime", "param_value", "degree",
              "energy_value", "energy_error", "ratio", "notes")
REGIMES = ("hhalf", "op51", "op53", "lemmas")
FORMATS = ("csv", "json")
_KEYS = {"families", "regime", "p_grid", "delta_grid", "N", "tol", "output_path", "format"}


@dataclass(frozen=True)
class ScanConfig:
    families: tuple
    regime: str
    p_grid: tuple = ()
    delta_grid: tuple = ()
    grid_size: int = 2048
    tol: float = 1e-4
    output_path: Optional[str] = None
    format: str = "csv"


def _finite_list(raw, name, problems):
    if not isinstance(raw, list):
        problems.append(f"{name}: expected a list of numbers")
        return ()
    out = []
    for x in raw:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            problems.append(f"{name}: {x!r} is not a finite number")
        else:
            out.append(float(x))
    return tuple(out)


def parse_config(text: str) -> ScanConfig:
    """Parse and validate a scan config; every violated constraint is reported at once."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("config must be a single object", line=1)

    problems = [f"unknown key {k!r}" for k in sorted(set(doc) - _KEYS)]

    families = []
    raw_fams = doc.get("families")
    if not isinstance(raw_fams, list):
        problems.append("families: expected a list of family specs")
        raw_fams = []
    for item in raw_fams:
        try:
            families.append(FamilySpec.parse(str(item)))
        except ValueError as exc:
            problems.append(f"families: {exc}")

    regime = doc.get("regime")
    if regime not in REGIMES:
        problems.append(f"regime: {regime!r} is not one of {', '.join(REGIMES)}")

    p_grid = _finite_list(doc.get("p_grid", []), "p_grid", problems)
    delta_grid = _finite_list(doc.get("delta_grid", []), "delta_grid", problems)
    p_max = 1.5 if regime == "lemmas" else 2.0
    for p in p_grid:
        if not 1.0 < p <= p_max:
            problems.append(f"p_grid: {p!r} outside the interval (1, {p_max:g}]")
    for d in delta_grid:
        if not 0.0 < d <= SQRT3:
            problems.append(f"delta_grid: {d!r} outside the interval (0, sqrt(3)]")
    if regime == "op51" and not p_grid:
        problems.append("p_grid: must be nonempty for regime op51")
    if regime == "op53" and not delta_grid:
        problems.append("delta_grid: must be nonempty for regime op53")
    if regime == "lemmas" and not (p_grid or delta_grid):
        problems.append("lemmas regime needs a nonempty p_grid or delta_grid")

    n = doc.get("N", 2048)
    if isinstance(n, bool) or not isinstance(n, int) or n < 64:
        problems.append(f"N: {n!r} must be an integer >= 64")
    tol = doc.get("tol", 1e-4)
    if isinstance(tol, bool) or not isinstance(tol, (int, float)) or not (0 < tol < 1):
        problems.append(f"tol: {tol!r} must be a number in (0, 1)")
    fmt = doc.get("format", "csv")
    if fmt not in FORMATS:
        problems.append(f"format: {fmt!r} is not one of csv, json")
    out = doc.get("output_path")
    if out is not None and not isinstance(out, str):
        problems.append("output_path: expected a string")

    if problems:
        raise ValidationError(problems)
    return ScanConfig(tuple(families), regime, p_grid, delta_grid, n, float(tol), out, fmt)


def load_config(path) -> ScanConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def _num(x):
    if x is None or not math.isfinite(x):
        return None
    return float(format(x, ".12g"))


def report_rows(report: ScanReport) -> list:
    """Flatten a ScanReport into plain dicts keyed by the CSV header."""
    rows = []
    for r in report.rows:
        rows.append({
            "family": r.family.tag if r.family else "",
            "params": r.family.params_text if r.family else "",
            "regime": r.regime,
            "param_value": _num(r.param),
            "degree": r.degree,
            "energy_value": _num(r.energy.value) if r.energy else None,
            "energy_error": _num(r.energy.error_estimate) if r.energy else None,
            "ratio": _num(r.ratio),
            "notes": r.notes,
        })
    return rows


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def render_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in CSV_HEADER])
    return buf.getvalue()


def render_json(rows, sup_ratio=None, config_digest="", tool_version="") -> str:
    if sup_ratio is None:
        sup_ratio = max((r["ratio"] for r in rows if r["ratio"] is not None), default=0.0)
    doc = {
        "tool_version": tool_version,
        "config_digest": config_digest,
        "sup_ratio": _num(sup_ratio),
        "rows": list(rows),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _parse_cell(key, text):
    if key in ("family", "params", "regime", "notes"):
        return text
    if text == "":
        return None
    if key == "degree":
        return int(text)
    return float(text)


def read_report(path) -> dict:
    """Load a report written by ``render_csv`` or ``render_json``."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    rows = [{k: _parse_cell(k, v) for k, v in zip(CSV_HEADER, line)} for line in reader]
    return {"tool_version": "", "config_digest": "", "sup_ratio": None, "rows": rows}


def write_atomic(path, text: str):
    """Write via a temp file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
