"""Run directories: trajectories as CSV or JSONL plus JSON metadata and reports.

Floats are written with ``repr`` (CSV) or ``json`` (JSONL), both shortest
round-trip forms, so a stored trajectory reads back bit-exactly. Missing
diagnostics are an empty CSV cell or ``null``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Literal

import numpy as np
import structlog

from .diagnostics import DIAGNOSTIC_COLUMNS, AnchorPoint, ConvergenceReport, ToleranceSet
from .dynamics import IntegratorSettings, SystemSpec, Trajectory
from .exceptions import TrajectoryFormatError

logger = structlog.get_logger()

TrajectoryFormat = Literal["csv", "jsonl"]

META_FILE = "meta.json"
REPORT_FILE = "report.json"
SUMMARY_FILE = "summary.json"
ROWS_FILE = "rows.csv"


def trajectory_columns(dim: int) -> list[str]:
    return [
        "t",
        *(f"u_{i}" for i in range(dim)),
        *(f"v_{i}" for i in range(dim)),
        "running_l2_velocity",
        *DIAGNOSTIC_COLUMNS,
    ]


def trajectory_file(fmt: TrajectoryFormat) -> str:
    return f"trajectory.{fmt}"


def _rows(traj: Trajectory) -> list[dict[str, float | None]]:
    out = []
    for i in range(len(traj)):
        row: dict[str, float | None] = {"t": float(traj.times[i])}
        row.update({f"u_{j}": float(x) for j, x in enumerate(traj.positions[i])})
        row.update({f"v_{j}": float(x) for j, x in enumerate(traj.velocities[i])})
        row["running_l2_velocity"] = float(traj.running_l2_velocity[i])
        if traj.diagnostics is not None:
            row.update(traj.diagnostics[i].row())
        else:
            row.update({name: None for name in DIAGNOSTIC_COLUMNS})
        out.append(row)
    return out


def format_cell(value: Any) -> str:
    """Shortest round-trip text for a CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_rows_csv(path: Path, rows: list[dict[str, Any]]) -> None:
    """Rows with possibly differing keys; columns in order of first appearance."""
    columns: list[str] = []
    for row in rows:
        columns.extend(k for k in row if k not in columns)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_cell(row.get(c)) for c in columns])


def write_trajectory(traj: Trajectory, path: Path, fmt: TrajectoryFormat = "csv") -> None:
    rows = _rows(traj)
    if fmt == "csv":
        write_rows_csv(path, rows)
    else:
        with path.open("w", encoding="utf-8") as f:
            for row in rows:
                f.write(json.dumps(row) + "\n")
    logger.debug("trajectory_written", path=str(path), samples=len(rows), format=fmt)


def _parse_float(text: str, path: Path, row: int, column: str) -> float | None:
    if text == "":
        return None
    try:
        return float(text)
    except ValueError:
        raise TrajectoryFormatError(
            str(path), f"column {column!r} holds non-numeric {text!r}", row
        ) from None


def _read_csv(path: Path, columns: list[str]) -> list[list[float | None]]:
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != columns:
            raise TrajectoryFormatError(str(path), f"expected header {columns}, got {header}", 1)
        out = []
        for line_no, cells in enumerate(reader, start=2):
            if len(cells) != len(columns):
                raise TrajectoryFormatError(
                    str(path), f"expected {len(columns)} cells, got {len(cells)}", line_no
                )
            out.append(
                [_parse_float(c, path, line_no, n) for c, n in zip(cells, columns, strict=True)]
            )
    return out


def _read_jsonl(path: Path, columns: list[str]) -> list[list[float | None]]:
    out = []
    with path.open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise TrajectoryFormatError(str(path), f"invalid JSON: {e.msg}", line_no) from None
            if not isinstance(record, dict) or list(record) != columns:
                raise TrajectoryFormatError(
                    str(path), "record keys differ from the columns", line_no
                )
            values = []
            for name in columns:
                v = record[name]
                if v is not None and not isinstance(v, int | float):
                    raise TrajectoryFormatError(
                        str(path), f"column {name!r} is not numeric", line_no
                    )
                values.append(None if v is None else float(v))
            out.append(values)
    return out


def read_trajectory(
    path: Path,
    dim: int,
    system_hash: str,
    settings: IntegratorSettings,
    fmt: TrajectoryFormat = "csv",
    expected_samples: int | None = None,
) -> Trajectory:
    """Positions, velocities and running integral; diagnostics are recomputed, not read."""
    columns = trajectory_columns(dim)
    rows = _read_csv(path, columns) if fmt == "csv" else _read_jsonl(path, columns)
    first_line = 2 if fmt == "csv" else 1
    if expected_samples is not None and len(rows) != expected_samples:
        raise TrajectoryFormatError(
            str(path),
            f"expected {expected_samples} samples, found {len(rows)}",
            first_line + len(rows),
        )
    if not rows:
        raise TrajectoryFormatError(str(path), "no samples", first_line)
    core = 2 + 2 * dim
    for i, row in enumerate(rows):
        if any(v is None for v in row[:core]):
            raise TrajectoryFormatError(str(path), "state cells may not be empty", first_line + i)
    data = np.array([row[:core] for row in rows], dtype=np.float64)
    try:
        return Trajectory(
            times=data[:, 0].copy(),
            positions=data[:, 1 : 1 + dim].copy(),
            velocities=data[:, 1 + dim : 1 + 2 * dim].copy(),
            running_l2_velocity=data[:, 1 + 2 * dim].copy(),
            system_hash=system_hash,
            settings=settings,
        )
    except ValueError as e:
        raise TrajectoryFormatError(str(path), str(e)) from None


def write_json(path: Path, payload: Any) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")


def read_json(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise TrajectoryFormatError(str(path), f"invalid JSON: {e.msg}", e.lineno) from None


@dataclass(frozen=True)
class StoredRun:
    """Everything needed to re-report a simulate output."""

    scenario: str
    system: SystemSpec
    anchor: AnchorPoint | None
    tolerances: ToleranceSet
    trajectory: Trajectory
    fmt: TrajectoryFormat


def build_meta(
    scenario: str,
    params: dict[str, Any],
    system: SystemSpec,
    traj: Trajectory,
    anchor: AnchorPoint | None,
    seed: int,
    fmt: TrajectoryFormat,
    tolerances: ToleranceSet | None = None,
) -> dict[str, Any]:
    return {
        "scenario": scenario,
        "params": params,
        "system": system.describe(),
        "system_hash": traj.system_hash,
        "dim": traj.dim,
        "samples": len(traj),
        "settings": traj.settings.model_dump(mode="json"),
        "anchor": None
        if anchor is None
        else {"p": anchor.p.tolist(), "residual": anchor.residual},
        "seed": seed,
        "format": fmt,
        "tolerances": (tolerances or ToleranceSet()).model_dump(mode="json"),
    }


def load_run(directory: Path) -> StoredRun:
    meta_path = directory / META_FILE
    if not meta_path.is_file():
        raise TrajectoryFormatError(str(meta_path), "missing run metadata")
    meta = read_json(meta_path)
    try:
        system = SystemSpec.model_validate(meta["system"])
        settings = IntegratorSettings.model_validate(meta["settings"])
        tolerances = ToleranceSet.model_validate(meta["tolerances"])
        fmt: TrajectoryFormat = meta["format"]
        dim, samples, stored_hash = int(meta["dim"]), int(meta["samples"]), meta["system_hash"]
        anchor_meta = meta["anchor"]
    except (KeyError, TypeError, ValueError) as e:
        raise TrajectoryFormatError(str(meta_path), f"malformed metadata: {e}") from None
    if fmt not in ("csv", "jsonl"):
        raise TrajectoryFormatError(str(meta_path), f"unknown trajectory format {fmt!r}")
    if system.hash() != stored_hash:
        raise TrajectoryFormatError(str(meta_path), "system description does not match its hash")

    traj = read_trajectory(
        directory / trajectory_file(fmt), dim, stored_hash, settings, fmt, expected_samples=samples
    )
    anchor = None
    if anchor_meta is not None:
        anchor = AnchorPoint(
            p=np.array(anchor_meta["p"], dtype=np.float64), residual=anchor_meta["residual"]
        )
    logger.debug("run_loaded", directory=str(directory), samples=samples)
    return StoredRun(
        scenario=meta["scenario"],
        system=system,
        anchor=anchor,
        tolerances=tolerances,
        trajectory=traj,
        fmt=fmt,
    )


def report_payload(report: ConvergenceReport) -> dict[str, Any]:
    return {**report.model_dump(mode="json"), "passed": report.passed}
