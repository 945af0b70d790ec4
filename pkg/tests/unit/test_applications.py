"""Unit tests for constrained optimization, Tikhonov selection and games."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from inertial_dynamics_lab.applications import (
    BestResponseParams,
    ConstrainedProblem,
    GameSpec,
    best_response_discrete,
    build_game_system,
    build_gradient_projection_system,
    build_tikhonov_system,
    nash_residual,
    nash_residual_unregularized,
)
from inertial_dynamics_lab.dynamics import (
    PhaseState,
    PowerSchedule,
    SystemSpec,
    integrate,
    time_rescale,
)
from inertial_dynamics_lab.exceptions import (
    DimensionMismatchError,
    LabError,
    ParameterConditionError,
    UnsupportedOperationError,
)
from inertial_dynamics_lab.operators import (
    BallSet,
    SeparablePowerPotential,
    bilinear,
    half_squared_distance,
    quadratic,
)
from inertial_dynamics_lab.scenarios import heavy_ball_system, scalar_game


def _ball_problem(mu: float = 1.0) -> ConstrainedProblem:
    return ConstrainedProblem(
        objective=half_squared_distance([2.0, 0.0]),
        constraint=BallSet(center=[0.0, 0.0], radius=1.0),
        mu=mu,
    )


def test_constrained_fixed_point_residual() -> None:
    """Test that the projection of the unconstrained minimizer is a fixed point."""
    problem = _ball_problem()

    assert problem.fixed_point_residual(np.array([1.0, 0.0])) == 0.0
    assert problem.fixed_point_residual(np.array([0.0, 0.0])) == pytest.approx(1.0)


def test_constrained_problem_rejects_long_step() -> None:
    with pytest.raises(ValidationError):
        _ball_problem(mu=2.0)


def test_constrained_problem_needs_lipschitz_objective() -> None:
    with pytest.raises(ValidationError):
        ConstrainedProblem(
            objective=SeparablePowerPotential(weights=[1.0, 1.0], exponent=4.0),
            constraint=BallSet(center=[0.0, 0.0], radius=1.0),
            mu=0.5,
        )


def test_gradient_projection_system_needs_damping() -> None:
    """Test that gamma must exceed sqrt(2) for the 1/2-cocoercive residual map."""
    with pytest.raises(ParameterConditionError, match=r"sqrt\(2\)") as exc:
        build_gradient_projection_system(_ball_problem(), math.sqrt(2.0))

    assert isinstance(exc.value, LabError)
    assert exc.value.parameters == {"gamma": math.sqrt(2.0)}

    sys = build_gradient_projection_system(_ball_problem(), 2.0)
    assert sys.cocoercivity == 0.5
    assert sys.satisfies_damping_condition


def test_tikhonov_system_attaches_term(heavy_ball: SystemSpec) -> None:
    sys = build_tikhonov_system(heavy_ball, [0.0, 0.0], PowerSchedule(c=1.0, p=1.0))

    assert sys.tikhonov is not None
    assert sys.epsilon(1.0) == 0.5
    assert sys.hash() != heavy_ball.hash()


def test_tikhonov_system_errors(heavy_ball: SystemSpec) -> None:
    eps = PowerSchedule(c=1.0, p=1.0)
    regularized = build_tikhonov_system(heavy_ball, [0.0, 0.0], eps)

    with pytest.raises(ParameterConditionError):
        build_tikhonov_system(regularized, [0.0, 0.0], eps)
    with pytest.raises(UnsupportedOperationError):
        build_tikhonov_system(time_rescale(heavy_ball, 2.0), [0.0, 0.0], eps)
    with pytest.raises(DimensionMismatchError):
        build_tikhonov_system(heavy_ball, [0.0, 0.0, 0.0], eps)


def test_nash_residuals_at_known_point() -> None:
    """Test both stationarity residuals of the scalar game at (1, 0)."""
    game = scalar_game()

    assert np.allclose(game.potential().gradient(np.array([1.0, 0.0])), [2.0, -1.0])
    assert nash_residual(game, [1.0, 0.0]) == pytest.approx(math.sqrt(6.8))
    assert nash_residual_unregularized(game, [1.0, 0.0]) == pytest.approx(2.5)
    assert nash_residual(game, [0.0, 0.0]) == 0.0


def test_game_system_needs_damping() -> None:
    with pytest.raises(ParameterConditionError) as exc:
        build_game_system(scalar_game(lam_saddle=0.5), 1.2)

    assert exc.value.parameters == {"lam_saddle": 0.5, "gamma": 1.2}

    sys = build_game_system(scalar_game(), 2.0)
    assert sys.cocoercivity == 1.0


def test_game_rejects_mismatched_coupling() -> None:
    with pytest.raises(ValidationError):
        GameSpec(
            f1=quadratic([[1.0]]),
            f2=quadratic([[1.0]]),
            l1=[[1.0]],
            l2=[[1.0], [0.0]],
            saddle=bilinear(0.5),
            lam_saddle=1.0,
        )


def test_best_response_first_step() -> None:
    """Test the closed-form alternating responses for the scalar game."""
    params = BestResponseParams(alpha=0.5, nu=0.5, beta=0.2, iterations=1)
    x = np.array([1.0, 0.5])

    iterates = best_response_discrete(scalar_game(), params, x, x)
    xi = 0.125 * 0.5 + 0.5 * 1.0
    eta = 0.375 * xi + 0.5 * 0.5

    assert np.allclose(iterates[1], [xi, eta])


def test_best_response_converges_to_nash() -> None:
    game = scalar_game()
    params = BestResponseParams(alpha=0.5, nu=0.5, beta=0.2, iterations=200)

    iterates = best_response_discrete(game, params, [1.0, 0.5], [1.0, 0.5])

    assert iterates.shape == (201, 2)
    assert nash_residual_unregularized(game, iterates[-1]) <= 1e-6


def test_best_response_needs_quadratic_payoffs() -> None:
    game = GameSpec(
        f1=SeparablePowerPotential(weights=[1.0], exponent=4.0),
        f2=quadratic([[1.0]]),
        l1=[[1.0]],
        l2=[[1.0]],
        saddle=bilinear(0.5),
        lam_saddle=1.0,
    )
    params = BestResponseParams(alpha=0.5, nu=0.5, beta=0.0, iterations=1)

    with pytest.raises(UnsupportedOperationError):
        best_response_discrete(game, params, [0.0, 0.0], [0.0, 0.0])


def test_decoupled_game_matches_independent_players() -> None:
    """Test that with no coupling each player follows its own heavy-ball run."""
    game = GameSpec(
        f1=quadratic([[1.0]]),
        f2=quadratic([[1.0]]),
        l1=[[0.0]],
        l2=[[0.0]],
        saddle=bilinear(0.0),
        lam_saddle=1.0,
    )
    joint = integrate(build_game_system(game, 2.0), PhaseState.initial([1.0, -0.5]), 5.0, 1e-3)
    single = heavy_ball_system(2.0, dim=1)
    first = integrate(single, PhaseState.initial([1.0]), 5.0, 1e-3)
    second = integrate(single, PhaseState.initial([-0.5]), 5.0, 1e-3)

    assert np.abs(joint.positions[:, 0] - first.positions[:, 0]).max() <= 1e-12
    assert np.abs(joint.positions[:, 1] - second.positions[:, 0]).max() <= 1e-12
