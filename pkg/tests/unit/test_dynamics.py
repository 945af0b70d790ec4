"""Unit tests for system specs and RK4 integration."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from inertial_dynamics_lab.dynamics import (
    ExponentialSchedule,
    PhaseState,
    PowerSchedule,
    SystemSpec,
    TikhonovTerm,
    ZeroSchedule,
    epsilon_derivative,
    epsilon_value,
    integrate,
    time_rescale,
    vector_field,
)
from inertial_dynamics_lab.exceptions import (
    BlowUpError,
    DimensionMismatchError,
    UnsupportedOperationError,
)
from inertial_dynamics_lab.operators import (
    SeparablePowerPotential,
    ZeroOperator,
    half_squared_distance,
    quadratic,
)
from inertial_dynamics_lab.sharpness import RotationCase, rotation_system


def test_heavy_ball_matches_exact_solution(heavy_ball: SystemSpec) -> None:
    """Test RK4 against ``u(t) = (1 + t) e^{-t} u0`` for critical damping."""
    u0 = np.array([1.0, -0.5])
    traj = integrate(heavy_ball, PhaseState.initial(u0), 10.0, step=1e-3, sample_every=50)

    for t, u, v in zip(traj.times, traj.positions, traj.velocities, strict=True):
        assert np.allclose(u, (1.0 + t) * math.exp(-t) * u0, atol=1e-10)
        assert np.allclose(v, -t * math.exp(-t) * u0, atol=1e-10)



def test_rk4_is_fourth_order(heavy_ball: SystemSpec) -> None:
    """Test that halving the step divides the error at ``t = 2`` by about 16."""
    u0 = np.array([1.0, -0.5])
    exact_u = 3.0 * math.exp(-2.0) * u0
    exact_v = -2.0 * math.exp(-2.0) * u0
    errors = []
    for step in (0.1, 0.05, 0.025):
        final = integrate(heavy_ball, PhaseState.initial(u0), 2.0, step=step).final
        errors.append(max(np.abs(final.u - exact_u).max(), np.abs(final.v - exact_v).max()))

    assert errors[0] > errors[1] > errors[2] > 1e-13
    assert errors[0] / errors[1] >= 14.0
    assert errors[1] / errors[2] >= 14.0


def test_sample_times_end_on_horizon(heavy_ball: SystemSpec) -> None:
    """Test that the last sample is always taken at ``t_end``."""
    traj = integrate(heavy_ball, PhaseState.initial([1.0, 0.0]), 1.0, step=0.1, sample_every=3)

    assert np.allclose(traj.times, [0.0, 0.3, 0.6, 0.9, 1.0])
    assert traj.times[-1] == 1.0
    assert traj.settings.n_steps == 10


def test_step_is_adjusted_to_divide_horizon(heavy_ball: SystemSpec) -> None:
    traj = integrate(heavy_ball, PhaseState.initial([1.0, 0.0]), 1.0, step=0.3, sample_every=1)

    assert len(traj) == 4
    assert np.allclose(np.diff(traj.times), 1.0 / 3.0)


def test_running_velocity_integral(heavy_ball: SystemSpec) -> None:
    """Test that ``int |u'|^2`` tends to 1/2 from ``u0 = (1, 1)``."""
    traj = integrate(heavy_ball, PhaseState.initial([1.0, 1.0]), 20.0, step=1e-3, sample_every=100)

    assert traj.running_l2_velocity[0] == 0.0
    assert np.all(np.diff(traj.running_l2_velocity) >= 0.0)
    assert traj.running_l2_velocity[-1] == pytest.approx(0.5, abs=1e-6)
    expected = 21.0 * math.exp(-20.0) * math.sqrt(2.0)
    assert np.linalg.norm(traj.final.u) == pytest.approx(expected, rel=1e-4)


def test_equilibrium_initial_state_stays_put(heavy_ball: SystemSpec) -> None:
    traj = integrate(heavy_ball, PhaseState.initial([0.0, 0.0]), 5.0, step=1e-2, sample_every=10)

    assert np.all(traj.positions == 0.0)
    assert np.all(traj.velocities == 0.0)
    assert traj.running_l2_velocity[-1] == 0.0


def test_blow_up_is_reported() -> None:
    """Test that a non-convergent rotation run crosses a low threshold."""
    sys = rotation_system(RotationCase(gamma=0.1, lam=0.1))

    with pytest.raises(BlowUpError) as exc:
        integrate(sys, PhaseState.initial([1.0, 0.0]), 50.0, step=1e-2, blowup_threshold=1e3)

    assert 5.0 < exc.value.last_state.t < 20.0
    assert np.abs(exc.value.last_state.u).max() <= 1e3


def test_integrate_validates_arguments(heavy_ball: SystemSpec) -> None:
    init = PhaseState.initial([1.0, 0.0])

    with pytest.raises(ValueError):
        integrate(heavy_ball, init, 0.0)
    with pytest.raises(ValueError):
        integrate(heavy_ball, init, 1.0, step=-1.0)
    with pytest.raises(ValueError):
        integrate(heavy_ball, init, 1.0, sample_every=0)
    with pytest.raises(DimensionMismatchError):
        integrate(heavy_ball, PhaseState.initial([1.0, 0.0, 0.0]), 1.0)


def test_phase_state_rejects_mismatched_shapes() -> None:
    with pytest.raises(ValueError):
        PhaseState.initial([1.0, 0.0], [1.0])


def test_vector_field(heavy_ball: SystemSpec) -> None:
    """Test ``(v, -gamma v - grad phi(u))`` for the heavy ball."""
    du, dv = vector_field(heavy_ball, PhaseState.initial([1.0, 0.0], [0.0, 1.0]))

    assert np.array_equal(du, [0.0, 1.0])
    assert np.array_equal(dv, [-1.0, -2.0])


def test_non_affine_force_path() -> None:
    """Test that a quartic potential integrates through the generic force."""
    sys = SystemSpec(
        gamma=1.0,
        potential=SeparablePowerPotential(weights=[1.0], exponent=4.0),
        operator=ZeroOperator(size=1, cocoercivity=1.0),
    )
    traj = integrate(sys, PhaseState.initial([1.0]), 5.0, step=1e-3)

    assert abs(traj.final.u[0]) < 1.0
    assert traj.system_hash == sys.hash()


def test_schedules() -> None:
    power = PowerSchedule(c=2.0, p=1.0)
    expo = ExponentialSchedule(c=1.0, a=2.0)

    assert epsilon_value(power, 1.0) == 1.0
    assert epsilon_derivative(power, 1.0) == -0.5
    assert power.slow_decay
    assert not PowerSchedule(c=1.0, p=2.0).slow_decay
    assert epsilon_value(expo, 0.5) == pytest.approx(math.exp(-1.0))
    assert not expo.slow_decay
    assert epsilon_value(ZeroSchedule(), 3.0) == 0.0
    with pytest.raises(ValueError):
        epsilon_value(power, -1.0)


def test_tikhonov_term_requires_strong_monotonicity() -> None:
    """Test that Theta with a flat direction is refused."""
    with pytest.raises(ValidationError):
        TikhonovTerm(theta=quadratic(np.diag([1.0, 0.0])), epsilon=PowerSchedule(c=1.0, p=1.0))


def test_tikhonov_term_adds_to_force() -> None:
    tik = TikhonovTerm(theta=half_squared_distance([0.0, 0.0]), epsilon=PowerSchedule(c=1.0, p=1.0))
    sys = SystemSpec(
        gamma=1.0,
        potential=quadratic(np.diag([1.0, 0.0])),
        operator=ZeroOperator(size=2, cocoercivity=1.0),
        tikhonov=tik,
    )
    u = np.array([1.0, 2.0])

    assert np.allclose(sys.force(0.0, u), [2.0, 2.0])
    assert np.allclose(sys.force(1.0, u), [1.5, 1.0])
    assert sys.equilibrium_residual(u) == pytest.approx(1.0)


def test_system_rejects_mixed_dimensions() -> None:
    with pytest.raises(ValidationError):
        SystemSpec(gamma=1.0, potential=quadratic(np.eye(2)), operator=ZeroOperator(size=3))


def test_hash_is_stable_and_discriminating(heavy_ball: SystemSpec) -> None:
    """Test that equal descriptions hash equally and different gammas do not."""
    copy = SystemSpec.model_validate_json(heavy_ball.model_dump_json())

    assert copy.hash() == heavy_ball.hash()
    assert heavy_ball.model_copy(update={"gamma": 3.0}).hash() != heavy_ball.hash()


def test_time_rescale_scales_coefficients(heavy_ball: SystemSpec) -> None:
    """Test damping gamma k, forces k^2 and the unchanged lambda gamma^2."""
    scaled = time_rescale(heavy_ball, 2.0)
    u = np.array([1.0, 0.0])

    assert scaled.damping == 4.0
    assert np.allclose(scaled.force(0.0, u), 4.0 * heavy_ball.force(0.0, u))
    assert scaled.cocoercivity == pytest.approx(0.25)
    assert scaled.lambda_gamma_sq == pytest.approx(heavy_ball.lambda_gamma_sq, rel=1e-12)


def test_rescaled_product_reads_effective_constants(heavy_ball: SystemSpec) -> None:
    """Test that lambda gamma^2 is recomputed from lambda / k^2 and gamma k."""
    scaled = time_rescale(heavy_ball, 3.0)
    assert scaled.cocoercivity is not None

    assert scaled.lambda_gamma_sq == scaled.cocoercivity * scaled.damping**2
    assert scaled.lambda_gamma_sq == pytest.approx(4.0, rel=1e-12)
    assert time_rescale(scaled, 0.5).lambda_gamma_sq == pytest.approx(4.0, rel=1e-12)


def test_time_rescale_tracks_original_trajectory(heavy_ball: SystemSpec) -> None:
    """Test ``v(s) = u(2 s)`` on a shared sample grid."""
    init = PhaseState.initial([1.0, 0.0], [0.0, 0.5])
    original = integrate(heavy_ball, init, 4.0, step=1e-3, sample_every=200)
    rescaled = integrate(
        time_rescale(heavy_ball, 2.0),
        PhaseState.initial([1.0, 0.0], [0.0, 1.0]),
        2.0,
        step=1e-3,
        sample_every=100,
    )

    assert len(original) == len(rescaled)
    assert np.allclose(original.positions, rescaled.positions, atol=1e-9)
    assert np.allclose(2.0 * original.velocities, rescaled.velocities, atol=1e-9)


def test_time_rescale_refuses_tikhonov() -> None:
    tik = TikhonovTerm(theta=half_squared_distance([0.0]), epsilon=PowerSchedule(c=1.0, p=1.0))
    sys = SystemSpec(
        gamma=1.0, potential=quadratic([[1.0]]), operator=ZeroOperator(size=1), tikhonov=tik
    )

    with pytest.raises(UnsupportedOperationError):
        time_rescale(sys, 2.0)
    with pytest.raises(ValueError):
        time_rescale(sys.model_copy(update={"tikhonov": None}), 0.0)
