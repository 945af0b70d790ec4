"""Inertial Dynamics Lab - damped second-order dynamics with cocoercive operators."""

from .cli import main
from .config import Settings
from .dynamics import PhaseState, SystemSpec, Trajectory, integrate, time_rescale
from .scenarios import ScenarioCatalog, list_scenarios, run_scenario

__version__ = "0.1.0"
__all__ = [
    "PhaseState",
    "ScenarioCatalog",
    "Settings",
    "SystemSpec",
    "Trajectory",
    "integrate",
    "list_scenarios",
    "main",
    "run_scenario",
    "time_rescale",
]
