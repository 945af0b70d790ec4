"""Heavy ball with friction on a quadratic bowl."""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import Field

from ..dynamics import PhaseState, SystemSpec
from ..operators import ZeroOperator, quadratic
from .base import BaseScenario, IntegrationParams, ScenarioResult


class HeavyBallParams(IntegrationParams):
    gamma: float = Field(default=2.0, gt=0)
    stiffness: float = Field(default=1.0, gt=0)
    lam: float = Field(default=1.0, gt=0)
    u0: list[float] = [1.0, 1.0]
    v0: list[float] | None = None


def heavy_ball_system(
    gamma: float, dim: int = 2, stiffness: float = 1.0, lam: float = 1.0
) -> SystemSpec:
    """``phi = s/2 |x|^2`` and ``A = 0``; the null operator is claimed lam-cocoercive."""
    return SystemSpec(
        gamma=gamma,
        potential=quadratic(stiffness * np.eye(dim)),
        operator=ZeroOperator(size=dim, cocoercivity=lam),
    )


class HeavyBallScenario(BaseScenario):
    Params = HeavyBallParams

    @property
    def name(self) -> str:
        return "heavy-ball"

    @property
    def description(self) -> str:
        return "u'' + gamma u' + grad phi(u) = 0 with phi = s/2 |x|^2; converges to the origin."

    def execute(self, params: Any) -> ScenarioResult:
        p: HeavyBallParams = params
        sys = heavy_ball_system(p.gamma, len(p.u0), p.stiffness, p.lam)
        init = PhaseState.initial(p.u0, p.v0)
        traj, anchor, report = self._simulate(sys, init, p)
        summary = {
            "limit": report.limit_estimate,
            "distance_to_minimizer": report.final_anchor_distance,
            **self._operator_witnesses(sys),
        }
        return self._result(
            p, report.passed, summary, system=sys, trajectory=traj, anchor=anchor, report=report
        )
