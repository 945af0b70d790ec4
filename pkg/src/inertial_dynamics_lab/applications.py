"""Constrained optimization, Tikhonov selection and two-player game dynamics."""

from __future__ import annotations

import math
from typing import Any

import numpy as np
import structlog
from pydantic import BaseModel, Field, PrivateAttr, model_validator

from .core import Mat, Vec, as_mat, as_vec, check_dim, norm, solve_linear
from .dynamics import (
    ExponentialSchedule,
    PowerSchedule,
    SystemSpec,
    TikhonovTerm,
    ZeroSchedule,
)
from .exceptions import ParameterConditionError, UnsupportedOperationError
from .operators import (
    ConvexSetSpec,
    PotentialSpec,
    ProjectionResidual,
    QuadraticPotential,
    SaddleOperator,
    SaddleSpec,
    SpecModel,
    SumPotential,
    ZeroPotential,
    epi_hypo_regularize,
    half_squared_distance,
)

logger = structlog.get_logger()

Schedule = ZeroSchedule | PowerSchedule | ExponentialSchedule


class ConstrainedProblem(SpecModel):
    """``min g`` over ``C``, written as the zero of ``x - P_C(x - mu grad g(x))``."""

    objective: PotentialSpec
    constraint: ConvexSetSpec
    mu: float = Field(gt=0)

    @model_validator(mode="after")
    def validate_step(self) -> ConstrainedProblem:
        if self.objective.dim != self.constraint.dim:
            raise ValueError("objective and constraint dimensions differ")
        lip = self.objective.lipschitz()
        if lip is None:
            raise ValueError("objective gradient needs a known Lipschitz constant")
        if lip > 0 and not self.mu < 2.0 / lip:
            raise ValueError(f"step mu={self.mu} must lie in (0, 2/L) = (0, {2.0 / lip})")
        return self

    @property
    def dim(self) -> int:
        return self.objective.dim

    def fixed_point_residual(self, u: Vec) -> float:
        """``|u - P_C(u - mu grad g(u))|``."""
        return norm(u - self.constraint.project(u - self.mu * self.objective.gradient(u)))


def build_gradient_projection_system(problem: ConstrainedProblem, gamma: float) -> SystemSpec:
    """``u'' + gamma u' + u - P_C(u - mu grad g(u)) = 0``; the residual map is 1/2-cocoercive."""
    if not gamma > math.sqrt(2.0):
        raise ParameterConditionError(
            f"gamma={gamma} must exceed sqrt(2) so that lambda gamma^2 > 1 with lambda = 1/2",
            {"gamma": gamma},
        )
    op = ProjectionResidual(
        objective=problem.objective,
        constraint=problem.constraint,
        mu=problem.mu,
        cocoercivity=0.5,
    )
    return SystemSpec(gamma=gamma, potential=ZeroPotential(size=problem.dim), operator=op)


def build_tikhonov_system(base: SystemSpec, center: Any, epsilon: Schedule) -> SystemSpec:
    """Attach ``eps(t) grad Theta`` with ``Theta = 1/2 |x - c|^2`` (eta = delta = 1)."""
    if base.tikhonov is not None:
        raise ParameterConditionError("base system already carries a Tikhonov term")
    if base.time_scale != 1.0:
        raise UnsupportedOperationError("Tikhonov terms on time-rescaled systems")
    c = as_vec(center)
    check_dim(c, base.dim, "Theta center")
    probe = np.linspace(0.0, 100.0, 201)
    if any(epsilon.derivative(float(t)) > 0.0 for t in probe):
        raise ParameterConditionError("eps(t) must be nonincreasing")
    if not epsilon.slow_decay and epsilon.kind != "zero":
        logger.warning(
            "tikhonov_fast_decay",
            schedule=epsilon.kind,
            detail="int eps = +inf fails, so no selection of the minimal element is claimed",
        )
    term = TikhonovTerm(theta=half_squared_distance(c), epsilon=epsilon, eta=1.0, delta=1.0)
    return base.model_copy(update={"tikhonov": term})


class GameSpec(SpecModel):
    """Two players with payoffs f1, f2, coupling 1/2 |L1 x1 - L2 x2|^2 and saddle part L."""

    f1: PotentialSpec
    f2: PotentialSpec
    l1: list[list[float]]
    l2: list[list[float]]
    saddle: SaddleSpec
    lam_saddle: float = Field(gt=0)

    _l1: Mat = PrivateAttr()
    _l2: Mat = PrivateAttr()

    @model_validator(mode="after")
    def validate_dims(self) -> GameSpec:
        l1, l2 = as_mat(self.l1), as_mat(self.l2)
        if l1.shape[0] != l2.shape[0]:
            raise ValueError("L1 and L2 must share their codomain")
        if l1.shape[1] != self.f1.dim or l2.shape[1] != self.f2.dim:
            raise ValueError("L1, L2 columns must match the players' dimensions")
        if self.saddle.n1 != self.f1.dim or self.saddle.n2 != self.f2.dim:
            raise ValueError("saddle blocks must match the players' dimensions")
        return self

    def model_post_init(self, context: Any) -> None:
        self._l1 = as_mat(self.l1)
        self._l2 = as_mat(self.l2)

    @property
    def n1(self) -> int:
        return self.f1.dim

    @property
    def n2(self) -> int:
        return self.f2.dim

    @property
    def dim(self) -> int:
        return self.n1 + self.n2

    def coupling_matrix(self) -> Mat:
        """``K = [L1, -L2]`` so that ``Phi(x) = 1/2 |K x|^2``."""
        return np.hstack([self._l1, -self._l2])

    def potential(self) -> SumPotential:
        """``f1(x1) + f2(x2) + Phi(x1, x2)`` on the product space."""
        k = self.coupling_matrix()
        return SumPotential(
            terms=[
                self.f1.embedded(0, self.dim),
                self.f2.embedded(self.n1, self.dim),
                QuadraticPotential(q=(k.T @ k).tolist()),
            ]
        )


def build_game_system(game: GameSpec, gamma: float) -> SystemSpec:
    """Product-space dynamics driven by the epi-hypo regularized saddle operator."""
    if not game.lam_saddle * gamma**2 > 1.0:
        raise ParameterConditionError(
            f"lam_saddle * gamma^2 = {game.lam_saddle * gamma**2} must exceed 1",
            {"lam_saddle": game.lam_saddle, "gamma": gamma},
        )
    return SystemSpec(
        gamma=gamma,
        potential=game.potential(),
        operator=epi_hypo_regularize(game.saddle, game.lam_saddle),
    )


def nash_residual(game: GameSpec, x: Any) -> float:
    """Norm of the stacked stationarity system with the regularized saddle operator."""
    u = as_vec(x)
    check_dim(u, game.dim)
    op = epi_hypo_regularize(game.saddle, game.lam_saddle)
    return norm(game.potential().gradient(u) + op.apply(u))


def nash_residual_unregularized(game: GameSpec, x: Any) -> float:
    """Same stack with ``(grad_x1 L, -grad_x2 L)`` itself."""
    u = as_vec(x)
    check_dim(u, game.dim)
    return norm(game.potential().gradient(u) + SaddleOperator(saddle=game.saddle).apply(u))


class BestResponseParams(BaseModel):
    alpha: float = Field(gt=0)
    nu: float = Field(gt=0)
    beta: float = Field(ge=0, lt=1)
    iterations: int = Field(ge=1)


def _quadratic_form(p: Any, who: str) -> tuple[Mat, Vec]:
    form = p.affine_gradient()
    if form is None:
        raise UnsupportedOperationError(f"best response needs a quadratic payoff for {who}")
    return form  # type: ignore[no-any-return]


def best_response_discrete(
    game: GameSpec,
    params: BestResponseParams,
    x_prev: Any,
    x_curr: Any,
) -> Mat:
    """Inertial alternating proximal best responses.

    Player 1 minimizes ``f1 + Phi + L + |xi - y1|^2 / (2 alpha)`` around the
    extrapolated point ``y1 = x1 + beta (x1 - x1_prev)``; player 2 then answers
    the fresh x1 with ``f2 + Phi - L`` and step nu. Each step is an exact
    linear solve. Returns the iterates, starting with ``x_curr``.
    """
    prev, curr = as_vec(x_prev), as_vec(x_curr)
    check_dim(prev, game.dim, "previous iterate")
    check_dim(curr, game.dim, "current iterate")
    n1 = game.n1
    h1, g1 = _quadratic_form(game.f1, "player 1")
    h2, g2 = _quadratic_form(game.f2, "player 2")
    q1, q2, r, a, b = game.saddle.blocks
    l1, l2 = game._l1, game._l2

    sys1 = h1 + l1.T @ l1 + q1 + np.eye(n1) / params.alpha
    sys2 = h2 + l2.T @ l2 + q2 + np.eye(game.n2) / params.nu

    out = np.empty((params.iterations + 1, game.dim))
    out[0] = curr
    for k in range(params.iterations):
        x1, x2 = curr[:n1], curr[n1:]
        p1, p2 = prev[:n1], prev[n1:]
        y1 = x1 + params.beta * (x1 - p1)
        y2 = x2 + params.beta * (x2 - p2)
        xi = solve_linear(sys1, -g1 + l1.T @ (l2 @ x2) - r.T @ x2 - a + y1 / params.alpha)
        eta = solve_linear(sys2, -g2 + l2.T @ (l1 @ xi) + r @ xi - b + y2 / params.nu)
        prev, curr = curr, np.concatenate([xi, eta])
        out[k + 1] = curr
    logger.debug("best_response_finished", iterations=params.iterations, final=curr.tolist())
    return out
