"""
Inertial Dynamics Lab - command-line experiment runner
"""

from __future__ import annotations

import argparse
import itertools
import logging
import sys
import tomllib
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Literal

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .artifacts import (
    META_FILE,
    REPORT_FILE,
    ROWS_FILE,
    SUMMARY_FILE,
    TrajectoryFormat,
    build_meta,
    load_run,
    report_payload,
    trajectory_file,
    write_json,
    write_rows_csv,
    write_trajectory,
)
from .config import Settings
from .diagnostics import attach_diagnostics, convergence_report, find_equilibrium
from .exceptions import ConfigError, LabError
from .scenarios import ScenarioCatalog, ScenarioResult, run_scenario
from .sharpness import boundary_curve, sweep_point

logger = structlog.get_logger()

EXIT_PASS = 0
EXIT_ERROR = 1
EXIT_VERDICT_FAILED = 2

SHARPNESS_SCENARIO = "sharpness-sweep"
SWEEP_FILE = "sweep.csv"
BOUNDARY_FILE = "boundary.csv"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ScenarioSection(BaseModel):
    """``name`` plus overrides, checked later against the scenario's own parameters."""

    model_config = ConfigDict(extra="allow")

    name: str


class IntegratorSection(_Section):
    horizon: float | None = Field(default=None, gt=0)
    step: float | None = Field(default=None, gt=0)
    sample_every: int | None = Field(default=None, ge=1)


class OutputSection(_Section):
    dir: str | None = None
    format: Literal["csv", "jsonl"] = "csv"


class Axis(_Section):
    """Either ``start``/``stop``/``num`` (linspace) or explicit ``values``."""

    start: float | None = None
    stop: float | None = None
    num: int | None = Field(default=None, ge=0)
    values: list[Any] | None = None

    @model_validator(mode="after")
    def validate_shape(self) -> Axis:
        ranged = (self.start, self.stop, self.num)
        if self.values is not None:
            if any(v is not None for v in ranged):
                raise ValueError("give either values or start/stop/num")
        elif any(v is None for v in ranged):
            raise ValueError("start, stop and num are all required without values")
        return self

    def points(self) -> list[Any]:
        if self.values is not None:
            return list(self.values)
        grid = np.linspace(self.start, self.stop, self.num)  # type: ignore[arg-type]
        return [float(x) for x in grid]


class RunConfig(_Section):
    seed: int | None = None
    scenario: ScenarioSection
    integrator: IntegratorSection = Field(default_factory=IntegratorSection)
    output: OutputSection = Field(default_factory=OutputSection)
    sweep: dict[str, Axis] = Field(default_factory=dict)

    def overrides(self) -> dict[str, Any]:
        out = dict(self.scenario.model_extra or {})
        out.update(self.integrator.model_dump(exclude_none=True))
        return out

    def grid(self) -> list[dict[str, Any]]:
        """Cartesian product of the sweep axes, last axis fastest."""
        names = list(self.sweep)
        axes = [self.sweep[n].points() for n in names]
        return [dict(zip(names, combo, strict=True)) for combo in itertools.product(*axes)]


def _dotted(loc: Sequence[int | str]) -> str:
    return ".".join(str(p) for p in loc)


def load_config(path: Path) -> RunConfig:
    """Parse a TOML run configuration; failures name the line/column or the dotted key."""
    try:
        document = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(
            f"{path}: {e}", line=getattr(e, "lineno", None), column=getattr(e, "colno", None)
        ) from None
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        err = e.errors()[0]
        key = _dotted(err["loc"])
        raise ConfigError(f"{path}: {key}: {err['msg']}", key=key) from None


def configure_logging(log_level: str = "INFO") -> None:
    """Configure structured logging."""
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="iso"),
            (
                structlog.dev.ConsoleRenderer()
                if sys.stderr.isatty()
                else structlog.processors.JSONRenderer()
            ),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(getattr(logging, log_level.upper())),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=True,
    )


def _settings(base: Settings, seed: int | None) -> Settings:
    return base if seed is None else base.model_copy(update={"seed": seed})


def _exit_code(passed: bool) -> int:
    return EXIT_PASS if passed else EXIT_VERDICT_FAILED


def write_result(
    result: ScenarioResult, out: Path, fmt: TrajectoryFormat, settings: Settings
) -> None:
    """Everything a scenario produced, without timestamps, so reruns are byte-identical."""
    out.mkdir(parents=True, exist_ok=True)
    if result.trajectory is not None and result.system is not None:
        write_trajectory(result.trajectory, out / trajectory_file(fmt), fmt)
        meta = build_meta(
            result.name,
            result.params,
            result.system,
            result.trajectory,
            result.anchor,
            settings.seed,
            fmt,
        )
        write_json(out / META_FILE, meta)
    if result.report is not None:
        write_json(out / REPORT_FILE, report_payload(result.report))
    if result.rows:
        write_rows_csv(out / ROWS_FILE, result.rows)
    write_json(out / SUMMARY_FILE, result.to_dict())
    logger.info("results_written", scenario=result.name, out=str(out))


def cmd_simulate(args: argparse.Namespace, settings: Settings) -> int:
    if args.config is not None:
        config = load_config(Path(args.config))
        name, overrides = config.scenario.name, config.overrides()
        seed, out_dir, fmt = config.seed, config.output.dir, config.output.format
    elif args.scenario is not None:
        name, overrides, seed, out_dir, fmt = args.scenario, {}, None, None, "csv"
    else:
        raise ConfigError("simulate needs --config or a scenario name")

    settings = _settings(settings, args.seed if args.seed is not None else seed)
    fmt = args.format or fmt
    result = run_scenario(name, overrides, settings)
    write_result(result, Path(args.out or out_dir or "runs") / name, fmt, settings)
    print(f"{name}: {'pass' if result.passed else 'fail'}")
    return _exit_code(result.passed)


def _flatten(payload: dict[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, f"{name}."))
        elif isinstance(value, bool | int | float | str) or value is None:
            out[name] = value
    return out


def sweep_row(index: int, point: dict[str, Any], result: ScenarioResult) -> dict[str, Any]:
    row: dict[str, Any] = {"index": index, **point, "status": "pass" if result.passed else "fail"}
    row.update(_flatten(result.summary))
    if result.report is not None:
        report = result.report
        row.update(
            {
                "final_velocity_norm": report.final_velocity_norm,
                "l2_velocity_tail": report.l2_velocity_tail,
                "limit_residual": report.limit_residual,
                "anchor_oscillation": report.anchor_oscillation,
                "gamma0_monotonicity_defect": report.gamma0_monotonicity_defect,
            }
        )
        row.update({f"verdict.{k}": v for k, v in report.verdicts.items()})
    return row


def _sharpness_point(index: int, point: dict[str, Any]) -> dict[str, Any]:
    if "gamma" not in point or not ("theta" in point or "lam" in point):
        raise ConfigError("sharpness sweep axes are gamma and theta (or lam)", key="sweep")
    gamma = float(point["gamma"])
    theta = float(point["theta"]) if "theta" in point else float(point["lam"]) * gamma**2
    row = sweep_point(index, gamma, theta).model_dump()
    return {**row, "status": "pass" if row["oracle_agrees"] else "fail"}


SweepTask = tuple[int, str, dict[str, Any], dict[str, Any], Settings]


def _sweep_task(task: SweepTask) -> dict[str, Any]:
    """One grid point; a point the scenario rejects becomes an ``error`` row."""
    index, name, base, point, settings = task
    try:
        if name == SHARPNESS_SCENARIO:
            return _sharpness_point(index, point)
        result = run_scenario(name, {**base, **point}, settings)
    except ConfigError:
        raise
    except (LabError, ValueError) as e:
        logger.warning("sweep_point_failed", scenario=name, index=index, error=str(e))
        return {"index": index, **point, "status": "error", "error": str(e)}
    return sweep_row(index, point, result)


def run_sweep(
    name: str,
    base: dict[str, Any],
    grid: list[dict[str, Any]],
    settings: Settings,
    jobs: int = 1,
) -> list[dict[str, Any]]:
    """One row per grid point, ordered by grid index whatever ``jobs`` is."""
    if not grid:
        raise ConfigError("sweep grid is empty", key="sweep")
    ScenarioCatalog(settings).get(name)
    tasks: list[SweepTask] = [(i, name, base, point, settings) for i, point in enumerate(grid)]
    logger.info("sweep_started", scenario=name, points=len(tasks), jobs=jobs)
    if jobs == 1:
        return [_sweep_task(t) for t in tasks]
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=configure_logging, initargs=(settings.log_level,)
    ) as pool:
        return list(pool.map(_sweep_task, tasks))


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    if args.config is None:
        raise ConfigError("sweep needs --config")
    config = load_config(Path(args.config))
    settings = _settings(settings, args.seed if args.seed is not None else config.seed)
    name = config.scenario.name
    base = config.overrides()
    if name == SHARPNESS_SCENARIO and base:
        raise ConfigError("sharpness sweeps take no scenario overrides", key="scenario")
    rows = run_sweep(name, base, config.grid(), settings, args.jobs or settings.jobs)
    out = Path(args.out or config.output.dir or "runs") / name
    out.mkdir(parents=True, exist_ok=True)
    write_rows_csv(out / SWEEP_FILE, rows)
    if name == SHARPNESS_SCENARIO:
        gammas = sorted({float(p["gamma"]) for p in config.grid() if float(p["gamma"]) > 0})
        write_rows_csv(out / BOUNDARY_FILE, [b.model_dump() for b in boundary_curve(gammas)])
    errors = sum(r["status"] == "error" for r in rows)
    passed = all(r["status"] == "pass" for r in rows)
    logger.info("sweep_finished", scenario=name, points=len(rows), passed=passed, errors=errors)
    if errors:
        print(f"{name}: {len(rows)} points, {errors} rejected", file=sys.stderr)
        return EXIT_ERROR
    print(f"{name}: {len(rows)} points, {'pass' if passed else 'fail'}")
    return _exit_code(passed)


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    run_dir = Path(args.run)
    run = load_run(run_dir)
    if run.anchor is None:
        raise ConfigError(f"{run_dir}: run carries no equilibrium to report against")
    anchor = run.anchor
    if args.anchor is not None:
        try:
            guess = [float(x) for x in args.anchor.split(",")]
        except ValueError as e:
            message = f"--anchor must be comma-separated numbers: {e}"
            raise ConfigError(message, key="anchor") from e
        anchor = find_equilibrium(
            run.system,
            guess,
            settings.equilibrium_tol,
            max_iter=settings.equilibrium_max_iter,
        )
    traj = attach_diagnostics(run.trajectory, run.system, anchor)
    report = convergence_report(traj, run.system, anchor, run.tolerances)
    out = Path(args.out) if args.out else run_dir
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / REPORT_FILE, report_payload(report))
    print(f"{run.scenario}: {'pass' if report.passed else 'fail'}")
    return _exit_code(report.passed)


def cmd_list(args: argparse.Namespace, settings: Settings) -> int:
    for scenario in ScenarioCatalog(settings).scenarios:
        print(f"{scenario.name:<26} {scenario.description}")
    return EXIT_PASS


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with 1; 2 is reserved for failed verdicts."""

    def error(self, message: str) -> Any:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="inertial-dynamics-lab",
        description="Simulate and certify damped second-order monotone dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="seed for the sampled estimators")

    simulate = sub.add_parser("simulate", help="run one scenario end to end")
    simulate.add_argument("scenario", nargs="?", help="scenario name when no --config is given")
    common(simulate)
    simulate.add_argument("--format", choices=["csv", "jsonl"], help="trajectory format")
    simulate.set_defaults(handler=cmd_simulate)

    sweep = sub.add_parser("sweep", help="run a scenario over a parameter grid")
    common(sweep)
    sweep.add_argument("--jobs", type=int, help="worker processes")
    sweep.set_defaults(handler=cmd_sweep)

    report = sub.add_parser("report", help="recompute the report of a stored run")
    report.add_argument("run", help="directory written by simulate")
    report.add_argument("--out", help="directory for report.json (default: the run)")
    report.add_argument("--anchor", help="comma-separated point near another equilibrium")
    report.set_defaults(handler=cmd_report)

    listing = sub.add_parser("list-scenarios", help="show the scenario catalog")
    listing.set_defaults(handler=cmd_list)
    return parser


def run(argv: Sequence[str] | None = None, settings: Settings | None = None) -> int:
    """Parse ``argv`` and dispatch; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        settings = settings or Settings()
        return int(args.handler(args, settings))
    except (LabError, ValueError, OSError) as e:
        logger.exception("command_failed", command=args.command, error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    """Entry point for the inertial dynamics lab."""
    try:
        settings = Settings()
        configure_logging(settings.log_level)
        logger.debug("starting_inertial_dynamics_lab", version=settings.version)
        sys.exit(run(settings=settings))
    except KeyboardInterrupt:
        logger.info("run_interrupted", reason="keyboard_interrupt")
        sys.exit(EXIT_ERROR)
    except ValidationError as e:
        logger.exception("lab_failed", error=str(e))
        sys.exit(EXIT_ERROR)


if __name__ == "__main__":
    main()
