"""Time rescaling ``v(s) = u(k s)`` reproduced numerically."""

from __future__ import annotations

from typing import Any

import math

import numpy as np
from pydantic import Field, model_validator

from ..core import as_vec
from ..dynamics import PhaseState, integrate, time_rescale
from ..sharpness import RotationCase, rotation_system
from .base import BaseScenario, ScenarioParams, ScenarioResult

RESCALE_TOL = 1e-6
PRODUCT_RTOL = 1e-12


class RescaleParams(ScenarioParams):
    gamma: float = Field(default=2.0, gt=0)
    lam: float = Field(default=1.0, gt=0)
    k: float = Field(default=2.0, gt=0)
    horizon: float = Field(default=10.0, gt=0)
    step: float = Field(default=1e-4, gt=0)
    sample_every: int = Field(default=100, ge=1)
    u0: list[float] = Field(default=[1.0, 0.0], min_length=2, max_length=2)
    v0: list[float] = Field(default=[0.0, 0.5], min_length=2, max_length=2)

    @model_validator(mode="after")
    def validate_alignment(self) -> RescaleParams:
        stride = self.k * self.sample_every
        if abs(stride - round(stride)) > 1e-9:
            raise ValueError("k * sample_every must be an integer so the sample grids align")
        steps = self.horizon / (self.k * self.step)
        if abs(steps - round(steps)) > 1e-6:
            raise ValueError("horizon / (k * step) must be an integer so both runs end together")
        return self


class RescaleScenario(BaseScenario):
    Params = RescaleParams

    @property
    def name(self) -> str:
        return "rescale-check"

    @property
    def description(self) -> str:
        return "Damping gamma k and forces k^2 track u(k s); lambda gamma^2 is unchanged."

    def execute(self, params: Any) -> ScenarioResult:
        p: RescaleParams = params
        base = rotation_system(RotationCase(gamma=p.gamma, lam=p.lam))
        scaled = time_rescale(base, p.k)
        stride = round(p.k * p.sample_every)

        original = integrate(
            base,
            PhaseState.initial(p.u0, p.v0),
            p.horizon,
            p.step,
            stride,
            blowup_threshold=self.settings.blowup_threshold,
        )
        rescaled = integrate(
            scaled,
            PhaseState.initial(p.u0, p.k * as_vec(p.v0)),
            p.horizon / p.k,
            p.step,
            p.sample_every,
            blowup_threshold=self.settings.blowup_threshold,
        )
        count = min(len(original), len(rescaled))
        pos_err = float(
            np.abs(original.positions[:count] - rescaled.positions[:count]).max()
        )
        vel_err = float(
            np.abs(p.k * original.velocities[:count] - rescaled.velocities[:count]).max()
        )
        before, after = base.lambda_gamma_sq, scaled.lambda_gamma_sq
        product_preserved = (
            before is not None
            and after is not None
            and math.isclose(before, after, rel_tol=PRODUCT_RTOL)
        )
        summary = {
            "samples_compared": count,
            "max_position_error": pos_err,
            "max_velocity_error": vel_err,
            "lambda_gamma_sq": before,
            "lambda_gamma_sq_rescaled": after,
            "effective_cocoercivity": scaled.cocoercivity,
            "product_preserved": product_preserved,
        }
        passed = product_preserved and max(pos_err, vel_err) <= RESCALE_TOL
        return self._result(p, passed, summary, system=scaled, trajectory=rescaled)
