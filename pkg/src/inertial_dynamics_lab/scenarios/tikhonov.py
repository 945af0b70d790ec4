"""Viscosity selection of the minimum-norm equilibrium."""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import Field

from ..applications import build_tikhonov_system
from ..core import norm
from ..diagnostics import vi_residual
from ..dynamics import PhaseState, PowerSchedule, SystemSpec
from ..operators import ZeroOperator, quadratic
from .base import BaseScenario, IntegrationParams, ScenarioResult

SELECTION_TOL = 1e-3


class TikhonovParams(IntegrationParams):
    horizon: float | None = 200.0
    gamma: float = Field(default=2.0, gt=0)
    epsilon_scale: float = Field(default=4.0, gt=0)
    epsilon_power: float = Field(default=1.0, gt=0)
    u0: list[float] = [1.0, 1.0]
    v0: list[float] | None = None


def flat_valley_system(gamma: float) -> SystemSpec:
    """``phi = 1/2 x1^2`` on R^2: the equilibria are the whole x2 axis."""
    return SystemSpec(
        gamma=gamma,
        potential=quadratic(np.diag([1.0, 0.0])),
        operator=ZeroOperator(size=2, cocoercivity=1.0),
    )


class TikhonovScenario(BaseScenario):
    Params = TikhonovParams

    @property
    def name(self) -> str:
        return "tikhonov-min-norm"

    @property
    def description(self) -> str:
        return "eps(t) = c/(1+t)^p on a flat valley; trajectories select the minimum-norm point."

    def execute(self, params: Any) -> ScenarioResult:
        p: TikhonovParams = params
        center = np.zeros(2)
        sys = build_tikhonov_system(
            flat_valley_system(p.gamma),
            center,
            PowerSchedule(c=p.epsilon_scale, p=p.epsilon_power),
        )
        init = PhaseState.initial(p.u0, p.v0)
        traj, anchor, report = self._simulate(sys, init, p, anchor_guess=center)
        final = traj.final.u
        probes = [np.array([0.0, c]) for c in (-2.0, -1.0, 0.0, 1.0, 2.0)]
        vi = vi_residual(sys.tikhonov.theta, probes, final)  # type: ignore[union-attr]
        summary = {
            "selected_point": final.tolist(),
            "distance_to_min_norm": norm(final - anchor.p),
            "vi_residual": vi,
            "slow_decay": sys.tikhonov.epsilon.slow_decay,  # type: ignore[union-attr]
            **self._operator_witnesses(sys),
        }
        passed = (
            report.passed
            and summary["distance_to_min_norm"] <= SELECTION_TOL
            and vi <= SELECTION_TOL
        )
        return self._result(
            p, passed, summary, system=sys, trajectory=traj, anchor=anchor, report=report
        )
