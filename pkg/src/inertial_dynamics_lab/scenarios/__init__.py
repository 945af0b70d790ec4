"""Experiment catalog."""

from .base import BaseScenario, IntegrationParams, ScenarioParams, ScenarioResult
from .catalog import SCENARIO_TYPES, ScenarioCatalog, list_scenarios, run_scenario
from .contraction import ContractionScenario
from .game import GameContinuousScenario, GameDiscreteScenario, scalar_game
from .gradient_projection import GradientProjectionScenario
from .heavy_ball import HeavyBallScenario, heavy_ball_system
from .rescale import RescaleScenario
from .rotation import YosidaRotationScenario, closed_form_error
from .sharpness_sweep import SharpnessSweepScenario
from .tikhonov import TikhonovScenario, flat_valley_system

__all__ = [
    "SCENARIO_TYPES",
    "BaseScenario",
    "ContractionScenario",
    "GameContinuousScenario",
    "GameDiscreteScenario",
    "GradientProjectionScenario",
    "HeavyBallScenario",
    "IntegrationParams",
    "RescaleScenario",
    "ScenarioCatalog",
    "ScenarioParams",
    "ScenarioResult",
    "SharpnessSweepScenario",
    "TikhonovScenario",
    "YosidaRotationScenario",
    "closed_form_error",
    "flat_valley_system",
    "heavy_ball_system",
    "list_scenarios",
    "run_scenario",
    "scalar_game",
]
