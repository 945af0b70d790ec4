"""Fixed points of a nonexpansive map through ``A = I - T``."""

from __future__ import annotations

import math
from typing import Any

import numpy as np
from pydantic import Field

from ..core import as_mat, block_diag, norm
from ..dynamics import PhaseState, SystemSpec
from ..operators import ContractionResidual, LinearContraction, ZeroPotential
from .base import BaseScenario, IntegrationParams, ScenarioResult

FIXED_POINT_TOL = 1e-5


def default_contraction() -> list[list[float]]:
    """``blockdiag(1, 0.2 R(pi/2))``; its fixed points form the first axis."""
    c, s = math.cos(math.pi / 2), math.sin(math.pi / 2)
    rot = 0.2 * np.array([[c, -s], [s, c]])
    return block_diag(np.eye(1), rot).tolist()


class ContractionParams(IntegrationParams):
    gamma: float = Field(default=2.0, gt=0)
    contraction: list[list[float]] = Field(default_factory=default_contraction)
    u0: list[float] = [1.0, 1.0, 1.0]
    v0: list[float] | None = None


def contraction_system(gamma: float, matrix: list[list[float]]) -> SystemSpec:
    t = LinearContraction(matrix=as_mat(matrix).tolist())
    return SystemSpec(
        gamma=gamma,
        potential=ZeroPotential(size=t.dim),
        operator=ContractionResidual(contraction=t),
    )


class ContractionScenario(BaseScenario):
    Params = ContractionParams

    @property
    def name(self) -> str:
        return "contraction-fixed-point"

    @property
    def description(self) -> str:
        return "A = I - T for a linear contraction T; trajectories settle on Fix T."

    def execute(self, params: Any) -> ScenarioResult:
        p: ContractionParams = params
        sys = contraction_system(p.gamma, p.contraction)
        init = PhaseState.initial(p.u0, p.v0)
        traj, anchor, report = self._simulate(sys, init, p)
        final = traj.final.u
        t = sys.operator.contraction  # type: ignore[union-attr]
        fixed_point_defect = norm(final - t(final))
        summary = {
            "limit": report.limit_estimate,
            "fixed_point_defect": fixed_point_defect,
            **self._operator_witnesses(sys),
        }
        passed = report.passed and fixed_point_defect < FIXED_POINT_TOL
        return self._result(
            p, passed, summary, system=sys, trajectory=traj, anchor=anchor, report=report
        )
