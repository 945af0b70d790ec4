"""Unit tests for configuration."""

from pathlib import Path

import pytest
import structlog
from pydantic import ValidationError
from structlog.testing import capture_logs

from inertial_dynamics_lab.cli import Axis, configure_logging, load_config
from inertial_dynamics_lab.config import Settings
from inertial_dynamics_lab.exceptions import ConfigError


def test_settings_validates_log_level() -> None:
    """Test log level validation."""
    with pytest.raises(ValidationError):
        Settings(log_level="INVALID")


def test_configure_logging_filters_below_level() -> None:
    """Test that the structlog level set by configure_logging drops info events."""
    configure_logging("WARNING")
    log = structlog.get_logger()

    with capture_logs() as logs:
        log.info("scenario_started")
        log.warning("tikhonov_fast_decay")

    assert [e["event"] for e in logs] == ["tikhonov_fast_decay"]


def test_settings_defaults() -> None:
    """Test default values."""
    settings = Settings()

    assert settings.log_level == "INFO"
    assert settings.horizon == 50.0
    assert settings.step == 1e-3
    assert settings.sample_every == 100
    assert settings.seed == 42
    assert settings.jobs == 1


@pytest.mark.parametrize("field", ["horizon", "step", "equilibrium_tol", "blowup_threshold"])
def test_settings_rejects_non_positive(field: str) -> None:
    """Test that lengths and tolerances must be positive."""
    with pytest.raises(ValidationError):
        Settings(**{field: 0.0})


@pytest.mark.parametrize("field", ["sample_every", "jobs", "cocoercivity_samples"])
def test_settings_rejects_zero_counts(field: str) -> None:
    """Test that counts must be at least one."""
    with pytest.raises(ValidationError):
        Settings(**{field: 0})


def test_settings_from_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Test loading from environment variables."""
    monkeypatch.setenv("DYNLAB_LOG_LEVEL", "DEBUG")
    monkeypatch.setenv("DYNLAB_STEP", "0.01")
    monkeypatch.setenv("DYNLAB_SEED", "7")

    settings = Settings()

    assert settings.log_level == "DEBUG"
    assert settings.step == 0.01
    assert settings.seed == 7


def _write(tmp_path: Path, text: str) -> Path:
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")
    return path


def test_load_config_merges_overrides(tmp_path: Path) -> None:
    """Test that scenario keys and integrator fields become one override dict."""
    path = _write(
        tmp_path,
        'seed = 7\n\n[scenario]\nname = "heavy-ball"\ngamma = 3.0\n\n'
        "[integrator]\nhorizon = 10.0\n\n[output]\nformat = \"jsonl\"\n",
    )

    config = load_config(path)

    assert config.seed == 7
    assert config.scenario.name == "heavy-ball"
    assert config.overrides() == {"gamma": 3.0, "horizon": 10.0}
    assert config.output.format == "jsonl"
    assert config.grid() == [{}]


def test_load_config_names_unknown_key(tmp_path: Path) -> None:
    path = _write(tmp_path, '[scenario]\nname = "heavy-ball"\n\n[integrator]\nstpe = 0.1\n')

    with pytest.raises(ConfigError, match="integrator.stpe") as exc:
        load_config(path)

    assert exc.value.key == "integrator.stpe"


def test_load_config_reports_toml_position(tmp_path: Path) -> None:
    path = _write(tmp_path, "[scenario]\nname = \n")

    with pytest.raises(ConfigError, match="line 2"):
        load_config(path)


def test_sweep_grid_last_axis_fastest(tmp_path: Path) -> None:
    path = _write(
        tmp_path,
        '[scenario]\nname = "sharpness-sweep"\n\n[sweep.gamma]\nvalues = [1.0, 2.0]\n\n'
        "[sweep.theta]\nstart = 0.0\nstop = 1.0\nnum = 3\n",
    )

    grid = load_config(path).grid()

    assert len(grid) == 6
    assert grid[:3] == [
        {"gamma": 1.0, "theta": 0.0},
        {"gamma": 1.0, "theta": 0.5},
        {"gamma": 1.0, "theta": 1.0},
    ]


def test_axis_needs_one_shape() -> None:
    with pytest.raises(ValidationError):
        Axis(start=0.0, stop=1.0)
    with pytest.raises(ValidationError):
        Axis(start=0.0, stop=1.0, num=2, values=[1.0])
    assert Axis(values=[3, 4]).points() == [3, 4]
