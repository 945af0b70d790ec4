"""Unit tests for convex potentials."""

import numpy as np
import pytest
from pydantic import TypeAdapter, ValidationError

from inertial_dynamics_lab.core import ball_samples
from inertial_dynamics_lab.exceptions import DimensionMismatchError
from inertial_dynamics_lab.operators import (
    PotentialSpec,
    QuadraticPotential,
    ScaledPotential,
    SeparablePowerPotential,
    SumPotential,
    ZeroPotential,
    finite_difference_gradient,
    grad,
    half_squared_distance,
    quadratic,
)

CATALOG = [
    quadratic([[2.0, 0.5], [0.5, 1.0]], center=[1.0, -1.0]),
    quadratic([[1.0, 0.0], [0.0, 0.0]], b=[0.5, 0.0]),
    half_squared_distance([0.5, 2.0]),
    SeparablePowerPotential(weights=[1.0, 0.5], exponent=4.0),
    SeparablePowerPotential(weights=[2.0, 0.0], exponent=2.0, center=[1.0, 1.0]),
    ScaledPotential(factor=3.0, base=half_squared_distance([0.0, 0.0])),
    SumPotential(
        terms=[quadratic(np.eye(2)), SeparablePowerPotential(weights=[1.0, 1.0], exponent=3.0)]
    ),
    ZeroPotential(size=2),
]


@pytest.mark.parametrize("potential", CATALOG, ids=lambda p: p.kind)
def test_gradient_matches_finite_differences(
    potential: object, rng: np.random.Generator
) -> None:
    """Test analytic gradients against central differences on 100 points."""
    for x in ball_samples(rng, 100, 2, 2.0):
        g = grad(potential, x)  # type: ignore[arg-type]
        fd = finite_difference_gradient(potential, x)  # type: ignore[arg-type]
        assert np.linalg.norm(g - fd) <= 1e-5 * max(1.0, float(np.linalg.norm(g)))


def test_quadratic_rejects_non_convex_form() -> None:
    with pytest.raises(ValidationError):
        quadratic([[1.0, 0.0], [0.0, -1.0]])


def test_quadratic_rejects_asymmetric_form() -> None:
    with pytest.raises(ValidationError):
        quadratic([[1.0, 1.0], [0.0, 1.0]])


def test_power_potential_rejects_small_exponent() -> None:
    with pytest.raises(ValidationError):
        SeparablePowerPotential(weights=[1.0], exponent=1.5)


def test_grad_checks_dimension() -> None:
    with pytest.raises(DimensionMismatchError):
        grad(half_squared_distance([0.0, 0.0]), np.zeros(3))


def test_quadratic_constants() -> None:
    """Test Lipschitz constant, strong convexity and infimum of a quadratic."""
    p = quadratic(np.diag([4.0, 1.0]), center=[1.0, 2.0])

    assert p.lipschitz() == pytest.approx(4.0)
    assert p.strong_convexity() == pytest.approx(1.0)
    assert p.infimum() == 0.0
    assert p.value(np.array([1.0, 2.0])) == 0.0


def test_quadratic_linear_term_matches_center_form() -> None:
    """Test ``1/2 <x, Q x> + <b, x>`` against the centered form with ``b = -Q c``."""
    q = np.diag([4.0, 1.0])
    c = np.array([1.0, 2.0])
    linear_form = quadratic(q, b=-(q @ c))
    centered = quadratic(q, center=c)
    x = np.array([0.3, -1.2])

    assert np.allclose(linear_form.gradient(x), centered.gradient(x))
    assert linear_form.value(x) == pytest.approx(centered.value(x) - 0.5 * float(c @ (q @ c)))
    assert linear_form.infimum() == pytest.approx(-4.0)
    assert linear_form.lipschitz() == pytest.approx(4.0)


def test_quadratic_unbounded_linear_term_has_no_infimum() -> None:
    p = quadratic(np.diag([1.0, 0.0]), b=[0.0, 1.0])

    assert p.infimum() is None
    with pytest.raises(ValidationError, match="linear term"):
        quadratic(np.eye(2), b=[1.0, 0.0, 0.0])


def test_power_potential_has_no_affine_gradient() -> None:
    p = SeparablePowerPotential(weights=[1.0, 1.0], exponent=4.0)

    assert p.affine_gradient() is None
    assert p.lipschitz() is None


def test_sum_combines_affine_gradients() -> None:
    s = SumPotential(terms=[quadratic(np.eye(2)), half_squared_distance([2.0, 0.0])])
    h, b = s.affine_gradient()  # type: ignore[misc]

    assert np.allclose(h, 2.0 * np.eye(2))
    assert np.allclose(b, [-2.0, 0.0])
    assert s.lipschitz() == pytest.approx(2.0)


def test_sum_rejects_mixed_dimensions() -> None:
    with pytest.raises(ValidationError):
        SumPotential(terms=[ZeroPotential(size=2), ZeroPotential(size=3)])


def test_scaled_potential_scales_everything() -> None:
    base = half_squared_distance([1.0])
    s = ScaledPotential(factor=4.0, base=base)
    x = np.array([3.0])

    assert s.value(x) == 4.0 * base.value(x)
    assert np.array_equal(s.gradient(x), 4.0 * base.gradient(x))
    assert s.infimum() == 0.0


def test_embedded_potential_acts_on_its_block() -> None:
    """Test that an embedded potential ignores coordinates outside its block."""
    p = quadratic([[2.0]], center=[1.0]).embedded(1, 3)
    x = np.array([5.0, 2.0, -7.0])

    assert isinstance(p, QuadraticPotential)
    assert p.value(x) == pytest.approx(1.0)
    assert np.allclose(p.gradient(x), [0.0, 2.0, 0.0])


def test_spec_round_trips_through_json() -> None:
    """Test that a tagged spec validates back to an identical description."""
    spec = ScaledPotential(factor=2.0, base=SeparablePowerPotential(weights=[1.0], exponent=4.0))
    adapter: TypeAdapter[object] = TypeAdapter(PotentialSpec)

    restored = adapter.validate_json(spec.model_dump_json())

    assert restored.model_dump() == spec.model_dump()  # type: ignore[attr-defined]
