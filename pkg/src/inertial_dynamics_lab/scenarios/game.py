"""Two-player games: continuous inertial dynamics and discrete best responses."""

from __future__ import annotations

from typing import Any

import numpy as np
from pydantic import Field, ValidationInfo, field_validator

from ..applications import (
    BestResponseParams,
    GameSpec,
    best_response_discrete,
    build_game_system,
    nash_residual,
    nash_residual_unregularized,
)
from ..dynamics import PhaseState
from ..operators import bilinear, quadratic
from .base import BaseScenario, IntegrationParams, ScenarioParams, ScenarioResult

NASH_TOL = 1e-6


def scalar_game(beta: float = 0.5, lam_saddle: float = 1.0) -> GameSpec:
    """``f_i = 1/2 x_i^2``, ``L1 = L2 = 1`` and ``L(x1, x2) = beta x1 x2``."""
    return GameSpec(
        f1=quadratic([[1.0]]),
        f2=quadratic([[1.0]]),
        l1=[[1.0]],
        l2=[[1.0]],
        saddle=bilinear(beta),
        lam_saddle=lam_saddle,
    )


class GameParams(IntegrationParams):
    beta: float = 0.5
    lam_saddle: float = Field(default=1.0, gt=0)
    gamma: float = Field(default=2.0, gt=0, validate_default=True)
    u0: list[float] = Field(default=[1.0, 0.5], min_length=2, max_length=2)
    v0: list[float] | None = None

    @field_validator("gamma")
    @classmethod
    def validate_damping(cls, v: float, info: ValidationInfo) -> float:
        lam = info.data.get("lam_saddle")
        if lam is not None and not lam * v**2 > 1.0:
            raise ValueError(f"lam_saddle * gamma^2 = {lam * v**2} must exceed 1")
        return v


class GameContinuousScenario(BaseScenario):
    Params = GameParams

    @property
    def name(self) -> str:
        return "game-continuous"

    @property
    def description(self) -> str:
        return "Coupled players driven by the epi-hypo regularized saddle operator."

    def execute(self, params: Any) -> ScenarioResult:
        p: GameParams = params
        game = scalar_game(p.beta, p.lam_saddle)
        sys = build_game_system(game, p.gamma)
        init = PhaseState.initial(p.u0, p.v0)
        traj, anchor, report = self._simulate(sys, init, p)
        final = traj.final.u
        summary = {
            "nash_estimate": final.tolist(),
            "nash_residual": nash_residual(game, final),
            "nash_residual_unregularized": nash_residual_unregularized(game, final),
            **self._operator_witnesses(sys),
        }
        return self._result(
            p, report.passed, summary, system=sys, trajectory=traj, anchor=anchor, report=report
        )


class BestResponseScenarioParams(ScenarioParams):
    beta: float = 0.5
    lam_saddle: float = Field(default=1.0, gt=0)
    alpha: float = Field(default=0.5, gt=0)
    nu: float = Field(default=0.5, gt=0)
    beta_inertia: float = Field(default=0.2, ge=0, lt=1)
    iterations: int = Field(default=200, ge=1)
    x0: list[float] = Field(default=[1.0, 0.5], min_length=2, max_length=2)


class GameDiscreteScenario(BaseScenario):
    Params = BestResponseScenarioParams

    @property
    def name(self) -> str:
        return "game-discrete"

    @property
    def description(self) -> str:
        return "Inertial alternating proximal best responses for the scalar two-player game."

    def execute(self, params: Any) -> ScenarioResult:
        p: BestResponseScenarioParams = params
        game = scalar_game(p.beta, p.lam_saddle)
        iterates = best_response_discrete(
            game,
            BestResponseParams(
                alpha=p.alpha, nu=p.nu, beta=p.beta_inertia, iterations=p.iterations
            ),
            p.x0,
            p.x0,
        )
        final = iterates[-1]
        residual = nash_residual_unregularized(game, final)
        summary = {
            "nash_estimate": final.tolist(),
            "nash_residual_unregularized": residual,
            "nash_residual": nash_residual(game, final),
            "step_norms_tail": float(np.linalg.norm(np.diff(iterates[-10:], axis=0), axis=1).max()),
        }
        rows = [
            {"iteration": k, **{f"x_{i}": float(v) for i, v in enumerate(x)}}
            for k, x in enumerate(iterates)
        ]
        return self._result(p, residual <= NASH_TOL, summary, rows=rows)
