"""Constrained minimization through the gradient-projection residual."""

from __future__ import annotations

import math
from typing import Any

from pydantic import Field, field_validator

from ..applications import ConstrainedProblem, build_gradient_projection_system
from ..dynamics import PhaseState
from ..operators import BallSet, half_squared_distance
from .base import BaseScenario, IntegrationParams, ScenarioResult

PROJECTION_TOL = 1e-5


class GradientProjectionParams(IntegrationParams):
    target: list[float] = [2.0, 0.0]
    radius: float = Field(default=1.0, gt=0)
    mu: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=2.0, gt=0)
    u0: list[float] | None = None
    v0: list[float] | None = None

    @field_validator("mu")
    @classmethod
    def validate_mu(cls, v: float) -> float:
        # grad of 1/2 |x - target|^2 is 1-Lipschitz
        if not v < 2.0:
            raise ValueError(f"mu={v} must lie in (0, 2)")
        return v

    @field_validator("gamma")
    @classmethod
    def validate_gamma(cls, v: float) -> float:
        if not v > math.sqrt(2.0):
            raise ValueError(f"gamma={v} must exceed sqrt(2)")
        return v


class GradientProjectionScenario(BaseScenario):
    Params = GradientProjectionParams

    @property
    def name(self) -> str:
        return "gradient-projection"

    @property
    def description(self) -> str:
        return (
            "min 1/2 |x - target|^2 over a centered ball via "
            "u'' + gamma u' + u - P_C(u - mu grad g(u)) = 0."
        )

    def execute(self, params: Any) -> ScenarioResult:
        p: GradientProjectionParams = params
        dim = len(p.target)
        problem = ConstrainedProblem(
            objective=half_squared_distance(p.target),
            constraint=BallSet(center=[0.0] * dim, radius=p.radius),
            mu=p.mu,
        )
        sys = build_gradient_projection_system(problem, p.gamma)
        init = PhaseState.initial(p.u0 if p.u0 is not None else [0.0] * dim, p.v0)
        traj, anchor, report = self._simulate(sys, init, p)
        final = traj.final.u
        residual = problem.fixed_point_residual(final)
        summary = {
            "minimizer_estimate": final.tolist(),
            "fixed_point_residual": residual,
            "feasible": problem.constraint.contains(final, tol=PROJECTION_TOL),
            **self._operator_witnesses(sys),
        }
        passed = report.passed and residual <= PROJECTION_TOL
        return self._result(
            p, passed, summary, system=sys, trajectory=traj, anchor=anchor, report=report
        )
