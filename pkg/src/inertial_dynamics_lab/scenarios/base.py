"""Base scenario class for the experiment catalog."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, ClassVar

import structlog
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..config import Settings
from ..diagnostics import (
    AnchorPoint,
    ConvergenceReport,
    ToleranceSet,
    attach_diagnostics,
    convergence_report,
    find_equilibrium,
    strong_monotonicity_estimate,
)
from ..dynamics import PhaseState, SystemSpec, Trajectory, integrate
from ..exceptions import DegenerateSampleError, ScenarioError
from ..operators import cocoercivity_estimate

logger = structlog.get_logger()


class ScenarioParams(BaseModel):
    """Overridable parameters; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)


class IntegrationParams(ScenarioParams):
    """Integrator controls; ``None`` falls back to the process settings."""

    horizon: float | None = Field(default=None, gt=0)
    step: float | None = Field(default=None, gt=0)
    sample_every: int | None = Field(default=None, ge=1)


@dataclass
class ScenarioResult:
    name: str
    params: dict[str, Any]
    passed: bool
    summary: dict[str, Any]
    system: SystemSpec | None = None
    trajectory: Trajectory | None = None
    anchor: AnchorPoint | None = None
    report: ConvergenceReport | None = None
    rows: list[dict[str, Any]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        """JSON-compatible summary written next to the trajectory."""
        out: dict[str, Any] = {
            "scenario": self.name,
            "status": "pass" if self.passed else "fail",
            "params": self.params,
            "summary": self.summary,
        }
        if self.report is not None:
            out["report"] = self.report.model_dump(mode="json")
        return out


class BaseScenario(ABC):
    """Base class for all catalog scenarios."""

    Params: ClassVar[type[ScenarioParams]] = ScenarioParams

    def __init__(self, settings: Settings):
        self.settings = settings

    @property
    @abstractmethod
    def name(self) -> str:
        """Catalog name."""

    @property
    @abstractmethod
    def description(self) -> str:
        """One-line description for ``list-scenarios``."""

    def parameters(self, overrides: dict[str, Any] | None = None) -> ScenarioParams:
        """Defaults merged with ``overrides``, validated against :attr:`Params`."""
        try:
            return self.Params.model_validate(overrides or {})
        except ValidationError as e:
            details = [
                {"key": ".".join(str(p) for p in err["loc"]), "error": err["msg"]}
                for err in e.errors()
            ]
            problems = "; ".join(f"{d['key'] or 'parameters'}: {d['error']}" for d in details)
            message = f"invalid override for scenario {self.name}: {problems}"
            raise ScenarioError(message, details) from e

    @abstractmethod
    def execute(self, params: Any) -> ScenarioResult:
        """Build, run and assess the scenario."""

    def run(self, overrides: dict[str, Any] | None = None) -> ScenarioResult:
        params = self.parameters(overrides)
        logger.info("scenario_started", scenario=self.name)
        result = self.execute(params)
        logger.info("scenario_executed", scenario=self.name, passed=result.passed)
        return result

    def _integration(self, params: IntegrationParams) -> tuple[float, float, int]:
        horizon = params.horizon if params.horizon is not None else self.settings.horizon
        step = params.step if params.step is not None else self.settings.step
        every = params.sample_every or self.settings.sample_every
        return horizon, step, every

    def _simulate(
        self,
        sys: SystemSpec,
        init: PhaseState,
        params: IntegrationParams,
        anchor_guess: Any = None,
        tolerances: ToleranceSet | None = None,
    ) -> tuple[Trajectory, AnchorPoint, ConvergenceReport]:
        """integrate -> anchor -> diagnostics -> report."""
        horizon, step, every = self._integration(params)
        traj = integrate(
            sys,
            init,
            init.t + horizon,
            step,
            every,
            blowup_threshold=self.settings.blowup_threshold,
        )
        guess = init.u if anchor_guess is None else anchor_guess
        anchor = find_equilibrium(
            sys,
            guess,
            self.settings.equilibrium_tol,
            max_iter=self.settings.equilibrium_max_iter,
        )
        traj = attach_diagnostics(traj, sys, anchor)
        return traj, anchor, convergence_report(traj, sys, anchor, tolerances)

    def _operator_witnesses(self, sys: SystemSpec) -> dict[str, float | None]:
        """Sampled cocoercivity and strong-monotonicity witnesses for the summary."""
        samples = self.settings.cocoercivity_samples
        seed = self.settings.seed
        try:
            coco: float | None = cocoercivity_estimate(sys.operator, sys.dim, samples, 1.0, seed)
        except DegenerateSampleError:
            coco = None
        return {
            "claimed_cocoercivity": sys.operator.claimed_cocoercivity,
            "lambda_gamma_sq": sys.lambda_gamma_sq,
            "cocoercivity_witness": coco,
            "strong_monotonicity_witness": strong_monotonicity_estimate(sys, samples, 1.0, seed),
        }

    def _result(
        self,
        params: ScenarioParams,
        passed: bool,
        summary: dict[str, Any],
        **kwargs: Any,
    ) -> ScenarioResult:
        return ScenarioResult(
            name=self.name,
            params=params.model_dump(mode="json"),
            passed=passed,
            summary=summary,
            **kwargs,
        )
