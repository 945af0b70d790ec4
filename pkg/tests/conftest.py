"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from inertial_dynamics_lab.cli import configure_logging
from inertial_dynamics_lab.config import Settings
from inertial_dynamics_lab.dynamics import SystemSpec
from inertial_dynamics_lab.operators import ROTATION, linear, quadratic, yosida_of
from inertial_dynamics_lab.scenarios import heavy_ball_system
from inertial_dynamics_lab.sharpness import RotationCase

configure_logging("WARNING")


@pytest.fixture
def settings() -> Settings:
    """Settings with a smaller estimator sample for fast scenario runs."""
    return Settings(log_level="WARNING", cocoercivity_samples=400)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)


@pytest.fixture
def heavy_ball() -> SystemSpec:
    """Critically damped heavy ball: phi = 1/2 |x|^2, gamma = 2."""
    return heavy_ball_system(2.0)


@pytest.fixture
def strongly_monotone() -> SystemSpec:
    """phi = 1/2 |x|^2 plus the Yosida approximation of the rotation at lam = 1."""
    return SystemSpec(
        gamma=2.0,
        potential=quadratic(np.eye(2)),
        operator=yosida_of(linear(ROTATION), 1.0),
    )


@pytest.fixture
def converging_case() -> RotationCase:
    return RotationCase(gamma=1.0, lam=3.0)


@pytest.fixture
def diverging_case() -> RotationCase:
    return RotationCase(gamma=1.0, lam=0.5)
