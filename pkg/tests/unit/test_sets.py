"""Unit tests for convex sets and projections."""

import numpy as np
import pytest
from pydantic import ValidationError

from inertial_dynamics_lab.core import ball_samples
from inertial_dynamics_lab.exceptions import DimensionMismatchError
from inertial_dynamics_lab.operators import (
    AffineSet,
    BallSet,
    BoxSet,
    ConvexSet,
    HalfspaceSet,
    WholeSpace,
    project,
)

SETS = [
    BoxSet(lower=[-1.0, 0.0], upper=[1.0, 2.0]),
    BallSet(center=[1.0, 1.0], radius=0.5),
    HalfspaceSet(normal=[1.0, 1.0], offset=1.0),
    AffineSet(matrix=[[1.0, -1.0]], rhs=[0.5]),
    WholeSpace(size=2),
]


def test_box_projection_clips() -> None:
    box = BoxSet(lower=[-1.0, 0.0], upper=[1.0, 2.0])

    assert np.array_equal(project(box, np.array([3.0, -1.0])), [1.0, 0.0])


def test_ball_projection_scales_onto_sphere() -> None:
    ball = BallSet(center=[0.0, 0.0], radius=1.0)

    assert np.allclose(project(ball, np.array([2.0, 0.0])), [1.0, 0.0])
    assert np.array_equal(project(ball, np.array([0.5, 0.0])), [0.5, 0.0])


def test_halfspace_projection() -> None:
    h = HalfspaceSet(normal=[0.0, 1.0], offset=1.0)

    assert np.allclose(project(h, np.array([3.0, 4.0])), [3.0, 1.0])


def test_affine_projection_lands_on_constraint() -> None:
    a = AffineSet(matrix=[[1.0, 1.0]], rhs=[2.0])
    p = project(a, np.array([0.0, 0.0]))

    assert np.allclose(p, [1.0, 1.0])


@pytest.mark.parametrize("c", SETS, ids=lambda c: c.kind)
def test_projection_properties(c: ConvexSet, rng: np.random.Generator) -> None:
    """Test idempotence, the variational inequality and nonexpansiveness."""
    points = ball_samples(rng, 60, 2, 3.0)
    projected = [project(c, v) for v in points]
    for v, p in zip(points, projected, strict=True):
        assert np.allclose(project(c, p), p, atol=1e-12)
        assert c.contains(p, tol=1e-10)
        for q in projected[:10]:
            assert float((v - p) @ (q - p)) <= 1e-10
    for i in range(len(points) - 1):
        lhs = np.linalg.norm(projected[i] - projected[i + 1])
        assert lhs <= np.linalg.norm(points[i] - points[i + 1]) + 1e-12


def test_empty_box_is_rejected() -> None:
    with pytest.raises(ValidationError):
        BoxSet(lower=[1.0], upper=[0.0])


def test_inconsistent_affine_set_is_rejected() -> None:
    with pytest.raises(ValidationError):
        AffineSet(matrix=[[1.0, 0.0], [1.0, 0.0]], rhs=[0.0, 1.0])


def test_zero_normal_is_rejected() -> None:
    with pytest.raises(ValidationError):
        HalfspaceSet(normal=[0.0, 0.0])


def test_projection_checks_dimension() -> None:
    with pytest.raises(DimensionMismatchError):
        project(WholeSpace(size=2), np.zeros(3))
