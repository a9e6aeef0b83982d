"""CSV and JSON exchange formats.

Force files carry a header row ``t,cl,cd`` (or ``t,cl`` for lift only),
comma separated, with ``#`` comment lines allowed anywhere. JSON output is
deterministic: keys keep their insertion order and every float is written
with 12 significant digits.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import InvalidConfig, InvalidSeries, MalformedCSV
from .signals import TimeSeries

SIG_DIGITS = 12


def _data_lines(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedCSV(f"cannot read {path}: {exc.strerror}") from exc
    return [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]


def read_columns(path, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Numeric columns of a headed CSV file, keyed by (lower-cased) header name."""
    lines = _data_lines(path)
    if not lines:
        raise MalformedCSV(f"{path}: no header row")
    rows = list(csv.reader(lines))
    header = [h.strip().lower() for h in rows[0]]
    for name in required:
        if name not in header:
            raise MalformedCSV(f"{path}: missing column '{name}' (header is {','.join(header)})")
    body = rows[1:]
    if not body:
        raise MalformedCSV(f"{path}: no data rows")
    columns = {}
    for name in header:
        idx = header.index(name)
        values = []
        for lineno, row in enumerate(body, start=2):
            if len(row) != len(header):
                raise MalformedCSV(f"{path}: data row {lineno} has {len(row)} fields, expected {len(header)}")
            try:
                values.append(float(row[idx]))
            except ValueError:
                raise MalformedCSV(f"{path}: non-numeric value {row[idx]!r} in column '{name}'") from None
        columns[name] = np.array(values)
    return columns


def read_forces(path, require_drag: bool = True) -> tuple[TimeSeries, TimeSeries | None]:
    """Lift (and drag) series from a force CSV; sample times must be uniform."""
    cols = read_columns(path, ("t", "cl", "cd") if require_drag else ("t", "cl"))
    try:
        lift = TimeSeries.from_samples(cols["t"], cols["cl"])
        drag = TimeSeries.from_samples(cols["t"], cols["cd"]) if "cd" in cols else None
    except InvalidSeries as exc:
        raise InvalidSeries(f"{path}: {exc}") from None
    return lift, drag


def fmt(x: float) -> str:
    return format(float(x), f".{SIG_DIGITS}g")


def write_csv(path, header: list[str], columns) -> Path:
    path = Path(path)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with path.open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def write_forces(path, lift: TimeSeries, drag: TimeSeries | None = None) -> Path:
    if drag is None:
        return write_csv(path, ["t", "cl"], [lift.times, lift.values])
    return write_csv(path, ["t", "cl", "cd"], [lift.times, lift.values, drag.values])


def _normalize(obj):
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return None
        return float(fmt(x))
    return obj


def dumps(obj) -> str:
    return json.dumps(_normalize(obj), indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj))
    return path


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InvalidConfig(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidConfig(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


@dataclass
class RunManifest:
    """What was run, on what, with which options, producing which files."""

    command: str
    inputs: list[str] = field(default_factory=list)
    options: dict = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    version: str = __version__

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "version": self.version,
            "inputs": list(self.inputs),
            "options": dict(self.options),
            "outputs": list(self.outputs),
        }

    def write(self, out_dir) -> Path:
        return write_json(Path(out_dir) / "manifest.json", self.to_dict())
