"""Registry of named scenarios with name-based dispatch."""

from __future__ import annotations

from typing import Any

import structlog

from ..config import Settings
from ..exceptions import ScenarioError
from .base import BaseScenario, ScenarioResult
from .contraction import ContractionScenario
from .game import GameContinuousScenario, GameDiscreteScenario
from .gradient_projection import GradientProjectionScenario
from .heavy_ball import HeavyBallScenario
from .rescale import RescaleScenario
from .rotation import YosidaRotationScenario
from .sharpness_sweep import SharpnessSweepScenario
from .tikhonov import TikhonovScenario

logger = structlog.get_logger()

SCENARIO_TYPES: tuple[type[BaseScenario], ...] = (
    HeavyBallScenario,
    ContractionScenario,
    YosidaRotationScenario,
    GradientProjectionScenario,
    TikhonovScenario,
    GameContinuousScenario,
    GameDiscreteScenario,
    RescaleScenario,
    SharpnessSweepScenario,
)


class ScenarioCatalog:
    """All scenarios, bound to one :class:`Settings`."""

    def __init__(self, settings: Settings | None = None):
        self.settings = settings or Settings()
        self.scenarios = [cls(self.settings) for cls in SCENARIO_TYPES]
        logger.debug("catalog_initialized", num_scenarios=len(self.scenarios))

    @property
    def names(self) -> list[str]:
        return [s.name for s in self.scenarios]

    def get(self, name: str) -> BaseScenario:
        scenario = next((s for s in self.scenarios if s.name == name), None)
        if scenario is None:
            logger.error("scenario_not_found", scenario=name)
            raise ScenarioError(
                f"unknown scenario: {name}", [{"key": "scenario", "error": ", ".join(self.names)}]
            )
        return scenario

    def run(self, name: str, overrides: dict[str, Any] | None = None) -> ScenarioResult:
        logger.info("scenario_called", scenario=name, overrides=overrides or {})
        return self.get(name).run(overrides)


def list_scenarios(settings: Settings | None = None) -> list[tuple[str, str]]:
    """``(name, description)`` pairs in catalog order."""
    return [(s.name, s.description) for s in ScenarioCatalog(settings).scenarios]


def run_scenario(
    name: str,
    overrides: dict[str, Any] | None = None,
    settings: Settings | None = None,
) -> ScenarioResult:
    return ScenarioCatalog(settings).run(name, overrides)
