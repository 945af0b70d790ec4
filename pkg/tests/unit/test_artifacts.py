"""Unit tests for trajectory files and run metadata."""

import json
from pathlib import Path

import numpy as np
import pytest

from inertial_dynamics_lab.artifacts import (
    META_FILE,
    TrajectoryFormat,
    build_meta,
    format_cell,
    load_run,
    read_json,
    read_trajectory,
    trajectory_columns,
    trajectory_file,
    write_json,
    write_rows_csv,
    write_trajectory,
)
from inertial_dynamics_lab.diagnostics import AnchorPoint, attach_diagnostics
from inertial_dynamics_lab.dynamics import PhaseState, SystemSpec, Trajectory, integrate
from inertial_dynamics_lab.exceptions import TrajectoryFormatError

ORIGIN = AnchorPoint(p=np.zeros(2), residual=0.0)


def _trajectory(sys: SystemSpec) -> Trajectory:
    init = PhaseState.initial([1.0, -0.25], [0.1, 0.0])
    traj = integrate(sys, init, 1.0, step=0.01, sample_every=25)
    return attach_diagnostics(traj, sys, ORIGIN)


def test_format_cell() -> None:
    assert format_cell(None) == ""
    assert format_cell(True) == "true"
    assert format_cell(0.1) == "0.1"
    assert format_cell(1e-20) == "1e-20"
    assert format_cell(3) == "3"
    assert format_cell("x") == "x"


def test_trajectory_columns() -> None:
    columns = trajectory_columns(2)

    assert columns[:6] == ["t", "u_0", "u_1", "v_0", "v_1", "running_l2_velocity"]
    assert "gamma0" in columns
    assert trajectory_file("jsonl") == "trajectory.jsonl"


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_trajectory_reads_back_exactly(
    heavy_ball: SystemSpec, tmp_path: Path, fmt: TrajectoryFormat
) -> None:
    """Test that stored states read back bit for bit."""
    traj = _trajectory(heavy_ball)
    path = tmp_path / trajectory_file(fmt)

    write_trajectory(traj, path, fmt)
    back = read_trajectory(path, 2, traj.system_hash, traj.settings, fmt, len(traj))

    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.positions, traj.positions)
    assert np.array_equal(back.velocities, traj.velocities)
    assert np.array_equal(back.running_l2_velocity, traj.running_l2_velocity)
    assert back.diagnostics is None


def test_missing_diagnostics_are_empty_cells(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    traj = integrate(heavy_ball, PhaseState.initial([1.0, 0.0]), 1.0, step=0.5, sample_every=1)
    path = tmp_path / "trajectory.csv"

    write_trajectory(traj, path)

    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 4
    assert lines[1].endswith("," * 9)


def test_truncated_csv_reports_row(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    """Test that a cut-off last line is reported with its line number."""
    traj = _trajectory(heavy_ball)
    path = tmp_path / "trajectory.csv"
    write_trajectory(traj, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[-1] = ",".join(lines[-1].split(",")[:3])
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    with pytest.raises(TrajectoryFormatError, match=f"row {len(lines)}") as exc:
        read_trajectory(path, 2, traj.system_hash, traj.settings, "csv", len(traj))

    assert exc.value.row == len(lines)


def test_missing_rows_are_reported(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    traj = _trajectory(heavy_ball)
    path = tmp_path / "trajectory.csv"
    write_trajectory(traj, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n", encoding="utf-8")

    with pytest.raises(TrajectoryFormatError, match="expected 5 samples"):
        read_trajectory(path, 2, traj.system_hash, traj.settings, "csv", len(traj))


def test_wrong_header_is_row_one(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    traj = _trajectory(heavy_ball)
    path = tmp_path / "trajectory.csv"
    write_trajectory(traj, path)

    with pytest.raises(TrajectoryFormatError, match="row 1"):
        read_trajectory(path, 3, traj.system_hash, traj.settings, "csv")


def test_non_numeric_cell(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    traj = _trajectory(heavy_ball)
    path = tmp_path / "trajectory.jsonl"
    write_trajectory(traj, path, "jsonl")
    records = [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]
    records[2]["u_0"] = "oops"
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")

    with pytest.raises(TrajectoryFormatError, match="row 3"):
        read_trajectory(path, 2, traj.system_hash, traj.settings, "jsonl")


def test_rows_csv_unions_columns(tmp_path: Path) -> None:
    path = tmp_path / "rows.csv"

    write_rows_csv(path, [{"a": 1, "b": 0.5}, {"a": 2, "c": None}])

    assert path.read_text(encoding="utf-8") == "a,b,c\n1,0.5,\n2,,\n"


def test_json_is_sorted_and_terminated(tmp_path: Path) -> None:
    path = tmp_path / "x.json"

    write_json(path, {"b": 1, "a": [0.1]})

    assert path.read_text(encoding="utf-8") == '{\n  "a": [\n    0.1\n  ],\n  "b": 1\n}\n'
    assert read_json(path) == {"a": [0.1], "b": 1}


def test_load_run_round_trip(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    """Test that metadata rebuilds the system and the stored trajectory."""
    traj = _trajectory(heavy_ball)
    write_trajectory(traj, tmp_path / "trajectory.csv")
    write_json(
        tmp_path / META_FILE,
        build_meta("heavy-ball", {"gamma": 2.0}, heavy_ball, traj, ORIGIN, 42, "csv"),
    )

    run = load_run(tmp_path)

    assert run.scenario == "heavy-ball"
    assert run.system.hash() == heavy_ball.hash()
    assert run.anchor is not None
    assert np.array_equal(run.anchor.p, ORIGIN.p)
    assert np.array_equal(run.trajectory.positions, traj.positions)
    assert run.trajectory.settings == traj.settings


def test_load_run_rejects_tampered_system(heavy_ball: SystemSpec, tmp_path: Path) -> None:
    traj = _trajectory(heavy_ball)
    write_trajectory(traj, tmp_path / "trajectory.csv")
    meta = build_meta("heavy-ball", {}, heavy_ball, traj, None, 42, "csv")
    meta["system"]["gamma"] = 3.0
    write_json(tmp_path / META_FILE, meta)

    with pytest.raises(TrajectoryFormatError, match="hash"):
        load_run(tmp_path)


def test_load_run_needs_metadata(tmp_path: Path) -> None:
    with pytest.raises(TrajectoryFormatError, match="missing run metadata"):
        load_run(tmp_path)
