"""Stability map of the rotation counterexample over a (gamma, theta) grid."""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import Field, model_validator

from ..sharpness import boundary_curve, sweep_point
from .base import BaseScenario, ScenarioParams, ScenarioResult


class SharpnessParams(ScenarioParams):
    gamma_start: float = Field(default=0.5, gt=0)
    gamma_stop: float = Field(default=4.0, gt=0)
    gamma_num: int = Field(default=20, ge=1)
    theta_start: float = Field(default=0.05, gt=0)
    theta_stop: float = Field(default=4.0, gt=0)
    theta_num: int = Field(default=20, ge=1)

    @model_validator(mode="after")
    def validate_ranges(self) -> SharpnessParams:
        if self.gamma_stop < self.gamma_start or self.theta_stop < self.theta_start:
            raise ValueError("ranges must be nondecreasing")
        return self

    def grid(self) -> list[tuple[float, float]]:
        gammas = np.linspace(self.gamma_start, self.gamma_stop, self.gamma_num)
        thetas = np.linspace(self.theta_start, self.theta_stop, self.theta_num)
        return [(float(g), float(t)) for g in gammas for t in thetas]


class SharpnessSweepScenario(BaseScenario):
    Params = SharpnessParams

    @property
    def name(self) -> str:
        return "sharpness-sweep"

    @property
    def description(self) -> str:
        return "Analytic a2-sign map checked by companion eigenvalues, with the exact boundary."

    def execute(self, params: Any) -> ScenarioResult:
        p: SharpnessParams = params
        rows = [sweep_point(i, g, t).model_dump() for i, (g, t) in enumerate(p.grid())]
        gammas = np.linspace(p.gamma_start, p.gamma_stop, p.gamma_num)
        boundary = [b.model_dump() for b in boundary_curve(float(g) for g in gammas)]
        summary = {
            "points": len(rows),
            "converging": sum(r["verdict"] == "Converging" for r in rows),
            "oracle_disagreements": sum(not r["oracle_agrees"] for r in rows),
            "threshold_claim_disagreements": sum(not r["claim_agrees"] for r in rows),
            "boundary": boundary,
        }
        passed = summary["oracle_disagreements"] == 0
        return self._result(p, passed, summary, rows=rows)
