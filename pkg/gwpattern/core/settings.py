import os
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field
import toml

_SETTINGS_CATEGORIES = ("numerics", "sampler", "verdict", "runner", "output")


class NumericsConfig(BaseModel):
    """Numerical tolerances and resource caps."""

    model_config = ConfigDict(extra="forbid")

    criticality_tolerance: float = Field(
        default=1e-9,
        gt=0,
        description="Maximum allowed |E xi - 1| for an offspring law to count as critical.",
    )
    truncation_tail: float = Field(
        default=1e-14,
        gt=0,
        description="Infinite-support families are cut where the remaining tail mass drops below this.",
    )
    fft_threshold: int = Field(
        default=4096,
        ge=1,
        description="Dense convolutions switch to FFT once both operands are at least this long.",
    )
    flush_threshold: float = Field(
        default=1e-300,
        ge=0,
        description="Probabilities below this are flushed to zero and booked as deficiency.",
    )
    max_support: int = Field(
        default=50_000_000,
        ge=1,
        description="Largest dense probability vector (in entries) any computation may allocate.",
    )


class SamplerConfig(BaseModel):
    """Tree sampler limits."""

    model_config = ConfigDict(extra="forbid")

    rejection_budget: int = Field(default=1_000_000, ge=1)
    size_cap: int = Field(default=1_000_000, ge=1)


class VerdictConfig(BaseModel):
    """Acceptance bands for experiment verdicts (calibration choices, not theory)."""

    model_config = ConfigDict(extra="forbid")

    stderr_band: float = Field(default=3.0, gt=0)
    relative_band: float = Field(default=0.05, gt=0)
    z_bound: float = Field(default=4.0, gt=0)
    llt_tolerance: float = Field(default=0.02, gt=0)
    tail_growth: float = Field(default=0.05, ge=0)
    concentration_growth: float = Field(default=1.5, gt=1)
    slope_margin: float = Field(default=0.1, ge=0)
    slope_ceiling: float = Field(default=0.55, gt=0)


class RunnerConfig(BaseModel):
    """Replicate execution."""

    model_config = ConfigDict(extra="forbid")

    threads: int = Field(default=1, ge=1, description="Worker threads for replicates.")
    chunk_size: int = Field(default=50, ge=1, description="Replicates per submitted task.")


class OutputConfig(BaseModel):
    """CLI output defaults."""

    model_config = ConfigDict(extra="forbid")

    format: Literal["json", "csv"] = "json"
    log_level: str = "WARNING"


class Settings(BaseModel):
    """All runtime configuration, grouped by concern."""

    model_config = ConfigDict(extra="forbid", validate_assignment=True)

    numerics: NumericsConfig = Field(default_factory=lambda: NumericsConfig())
    sampler: SamplerConfig = Field(default_factory=lambda: SamplerConfig())
    verdict: VerdictConfig = Field(default_factory=lambda: VerdictConfig())
    runner: RunnerConfig = Field(default_factory=lambda: RunnerConfig())
    output: OutputConfig = Field(default_factory=lambda: OutputConfig())

    @classmethod
    def from_file(cls, path: Path) -> "Settings":
        """Load settings from a TOML file; a missing file yields defaults."""
        if not path.exists():
            return cls()

        data = toml.load(path)
        updates: dict[str, dict[str, Any]] = {
            category: dict(data.get(category, {})) for category in _SETTINGS_CATEGORIES
        }
        return _apply_updates(cls(), updates)

    @classmethod
    def from_env(cls) -> "Settings":
        """Create settings with environment variable overrides only."""
        return _apply_updates(cls(), _collect_env_updates())


def _parse_env_value(category: str, field_name: str, value: str) -> Any:
    """Coerce an environment string to the type of the targeted field."""
    model: type[BaseModel] = type(getattr(Settings(), category))
    field = model.model_fields.get(field_name)
    if field is None:
        return value
    if field.annotation is int:
        try:
            return int(value)
        except ValueError:
            return value
    if field.annotation is float:
        try:
            return float(value)
        except ValueError:
            return value
    return value


def _collect_env_updates() -> dict[str, dict[str, Any]]:
    """Collect overrides from GWPATTERN_<CATEGORY>_<FIELD> and GWPATTERN_THREADS."""
    prefix = "GWPATTERN_"
    updates: dict[str, dict[str, Any]] = {category: {} for category in _SETTINGS_CATEGORIES}

    for key, value in os.environ.items():
        if not key.startswith(prefix):
            continue

        rest = key[len(prefix) :].lower()
        if rest == "threads":
            updates["runner"]["threads"] = _parse_env_value("runner", "threads", value)
            continue

        category, _, field_name = rest.partition("_")
        if category not in updates or not field_name:
            continue

        updates[category][field_name] = _parse_env_value(category, field_name, value)

    return updates


def _apply_updates(settings: Settings, updates: dict[str, dict[str, Any]]) -> Settings:
    """Apply partial category updates onto a settings object."""
    for category in _SETTINGS_CATEGORIES:
        if updates.get(category):
            current = getattr(settings, category)
            setattr(
                settings, category, type(current)(**{**current.model_dump(), **updates[category]})
            )
    return settings


def _config_path() -> Path:
    override = os.environ.get("GWPATTERN_CONFIG")
    if override:
        return Path(override)
    return Path.home() / ".gwpattern" / "config.toml"


_settings: Settings | None = None


def get_settings() -> Settings:
    """Get the process-wide settings (file, then environment overrides)."""
    global _settings
    if _settings is None:
        _settings = Settings.from_file(_config_path())
        _settings = _apply_updates(_settings, _collect_env_updates())

    return _settings


def reset_settings() -> None:
    """Reset the global settings singleton (primarily for tests)."""
    global _settings
    _settings = None


def set_settings(settings: Settings | None = None, **kwargs: Any) -> None:
    """
    Replace the global settings, or patch individual fields.

    Keyword arguments are ``<category>_<field>``, e.g.
    ``set_settings(verdict_relative_band=0.1, runner_threads=4)``.
    """
    global _settings

    if settings is not None:
        _settings = settings
    elif kwargs:
        if _settings is None:
            _settings = get_settings()

        updates: dict[str, dict[str, Any]] = {category: {} for category in _SETTINGS_CATEGORIES}

        for key, value in kwargs.items():
            category, _, field_name = key.partition("_")
            if category in updates and field_name:
                updates[category][field_name] = value

        _settings = _apply_updates(_settings, updates)
