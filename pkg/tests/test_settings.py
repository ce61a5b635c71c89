from pathlib import Path

from pydantic import ValidationError
import pytest
import toml

import gwpattern.core.settings as settings_module
from gwpattern.core.settings import (
    NumericsConfig,
    RunnerConfig,
    Settings,
    get_settings,
    reset_settings,
    set_settings,
)


class TestSettingsCore:
    """Tests for the Settings model."""

    def test_defaults(self):
        """Defaults match the documented tolerances and bands."""
        settings = Settings()
        assert settings.numerics.criticality_tolerance == 1e-9
        assert settings.numerics.truncation_tail == 1e-14
        assert settings.numerics.fft_threshold == 4096
        assert settings.verdict.stderr_band == 3.0
        assert settings.verdict.relative_band == 0.05
        assert settings.verdict.z_bound == 4.0
        assert settings.runner.threads == 1
        assert settings.output.format == "json"

    def test_extra_fields_forbidden(self):
        """Unknown keys are rejected."""
        with pytest.raises(ValidationError):
            NumericsConfig(fft_treshold=10)

    def test_field_bounds(self):
        """Out-of-range values are rejected."""
        with pytest.raises(ValidationError):
            RunnerConfig(threads=0)
        with pytest.raises(ValidationError):
            NumericsConfig(truncation_tail=0.0)

    def test_from_file(self, tmp_path: Path):
        """A TOML file overrides individual fields per category."""
        path = tmp_path / "config.toml"
        path.write_text(toml.dumps({"verdict": {"z_bound": 5.0}, "runner": {"threads": 3}}))
        settings = Settings.from_file(path)
        assert settings.verdict.z_bound == 5.0
        assert settings.verdict.stderr_band == 3.0
        assert settings.runner.threads == 3

    def test_from_missing_file(self, tmp_path: Path):
        """A missing file yields defaults."""
        assert Settings.from_file(tmp_path / "nope.toml") == Settings()


class TestEnvironment:
    """Tests for GWPATTERN_* overrides."""

    def test_threads_shortcut(self, monkeypatch):
        """GWPATTERN_THREADS caps the worker count."""
        monkeypatch.setenv("GWPATTERN_THREADS", "6")
        assert Settings.from_env().runner.threads == 6

    def test_category_field(self, monkeypatch):
        """GWPATTERN_<CATEGORY>_<FIELD> is coerced to the field type."""
        monkeypatch.setenv("GWPATTERN_NUMERICS_FFT_THRESHOLD", "128")
        monkeypatch.setenv("GWPATTERN_VERDICT_RELATIVE_BAND", "0.1")
        settings = Settings.from_env()
        assert settings.numerics.fft_threshold == 128
        assert settings.verdict.relative_band == 0.1

    def test_unknown_category_ignored(self, monkeypatch):
        """Variables outside the known categories are skipped."""
        monkeypatch.setenv("GWPATTERN_COLOUR_SCHEME", "dark")
        assert Settings.from_env() == Settings()

    def test_environment_beats_file(self, monkeypatch, tmp_path: Path):
        """The environment is applied after the config file."""
        path = tmp_path / "config.toml"
        path.write_text(toml.dumps({"runner": {"threads": 2, "chunk_size": 10}}))
        monkeypatch.setenv("GWPATTERN_CONFIG", str(path))
        monkeypatch.setenv("GWPATTERN_THREADS", "8")
        reset_settings()
        settings = get_settings()
        assert settings.runner.threads == 8
        assert settings.runner.chunk_size == 10


class TestGlobalSettings:
    """Tests for the process-wide singleton."""

    def test_singleton(self):
        """get_settings returns the same object until reset."""
        assert get_settings() is get_settings()
        first = get_settings()
        reset_settings()
        assert get_settings() is not first

    def test_set_settings_kwargs(self):
        """Keyword patches address <category>_<field>."""
        set_settings(verdict_relative_band=0.2, runner_threads=4)
        assert get_settings().verdict.relative_band == 0.2
        assert get_settings().runner.threads == 4
        assert get_settings().verdict.z_bound == 4.0

    def test_set_settings_object(self):
        """A whole Settings object can be installed."""
        custom = Settings(runner=RunnerConfig(threads=5))
        set_settings(custom)
        assert settings_module._settings is custom
        assert get_settings().runner.threads == 5
