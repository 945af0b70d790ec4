"""Damped Yosida-regularized rotation, checked against the explicit solution."""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import Field

from ..core import norm
from ..dynamics import PhaseState, Trajectory
from ..sharpness import (
    RotationCase,
    classify,
    closed_form_solution,
    fit_coefficients,
    rotation_system,
)
from .base import BaseScenario, IntegrationParams, ScenarioResult

CLOSED_FORM_WINDOW = 10.0
CLOSED_FORM_TOL = 1e-6


class RotationParams(IntegrationParams):
    gamma: float = Field(default=1.0, gt=0)
    lam: float = Field(default=3.0, gt=0)
    u0: list[float] = Field(default=[1.0, 0.0], min_length=2, max_length=2)
    v0: list[float] = Field(default=[0.0, 0.0], min_length=2, max_length=2)


def closed_form_error(traj: Trajectory, case: RotationCase, window: float) -> float:
    """Largest position error against the explicit solution on ``[t0, t0 + window]``."""
    first = traj.state(0)
    coeffs = fit_coefficients(case, first.u, first.v)
    worst = 0.0
    for s in traj.samples:
        if s.t - first.t > window:
            break
        exact, _ = closed_form_solution(case, coeffs, s.t - first.t)
        worst = max(worst, norm(s.u - exact))
    return worst


class YosidaRotationScenario(BaseScenario):
    Params = RotationParams

    @property
    def name(self) -> str:
        return "yosida-rotation"

    @property
    def description(self) -> str:
        return (
            "u'' + gamma u' + B_lam u = 0 for the Yosida approximation of the pi/2 rotation; "
            "converges iff a2 < 0."
        )

    def execute(self, params: Any) -> ScenarioResult:
        p: RotationParams = params
        case = RotationCase(gamma=p.gamma, lam=p.lam)
        verdict = classify(case)
        sys = rotation_system(case)
        init = PhaseState.initial(p.u0, p.v0)
        traj, anchor, report = self._simulate(sys, init, p, anchor_guess=np.zeros(2))
        error = closed_form_error(traj, case, CLOSED_FORM_WINDOW)
        summary = {
            "stability": verdict.model_dump(mode="json"),
            "closed_form_max_error": error,
            "final_norm": norm(traj.final.u),
            **self._operator_witnesses(sys),
        }
        passed = report.passed and verdict.converging and error <= CLOSED_FORM_TOL
        return self._result(
            p, passed, summary, system=sys, trajectory=traj, anchor=anchor, report=report
        )
