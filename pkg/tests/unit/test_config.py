"""Tests for tolerances and run-configuration parsing."""

import pytest

from epbeam.config import (
    DEFAULT_TOLERANCES,
    ConfigError,
    Tolerances,
    load_config,
    load_config_values,
    parse_config,
    parse_config_values,
)
from epbeam.models import Backend, OutputKind, SweepAxis

EXAMPLE = """
# eigenvalue flow for four photons
n = 4
eta = 0.8
Axis = gamma
min = 0
max = 4
steps = 41
backend = expm
outputs = eigenvalues, diagnostics
"""


class TestTolerances:
    """Test the numeric constants record."""

    def test_working_precision_grows_with_dimension(self):
        """Should add ten digits per dimension to the base precision."""
        assert DEFAULT_TOLERANCES.working_dps(3) == 50
        assert Tolerances(eig_base_dps=30, eig_dps_per_dim=5).working_dps(4) == 50

    def test_immutable(self):
        """Should not allow thresholds to change at run time."""
        with pytest.raises(AttributeError):
            DEFAULT_TOLERANCES.singular_threshold = 1.0


class TestParseConfigValues:
    """Test the flat key = value reader."""

    def test_reads_values(self):
        """Should strip whitespace, skip comments and lowercase keys."""
        values = parse_config_values(EXAMPLE)
        assert values["n"] == "4"
        assert values["axis"] == "gamma"
        assert values["outputs"] == "eigenvalues, diagnostics"
        assert len(values) == 8

    def test_last_value_wins(self):
        """Should keep the last of repeated keys."""
        assert parse_config_values("n = 2\nn = 3\n") == {"n": "3"}

    @pytest.mark.parametrize(
        "text,message",
        [
            ("n 4", "expected 'key = value'"),
            ("photons = 4", "unknown key"),
            ("eta =", "empty value"),
        ],
    )
    def test_errors(self, text, message):
        """Should report the offending line."""
        with pytest.raises(ConfigError, match=message):
            parse_config_values(text)

    def test_error_names_line(self):
        """Should include the line number."""
        with pytest.raises(ConfigError, match="line 3"):
            parse_config_values("n = 2\n\nbogus = 1\n")


class TestParseConfig:
    """Test conversion into validated sweep settings."""

    def test_builds_sweep_spec(self):
        """Should convert every field to its typed value."""
        spec = parse_config(EXAMPLE)
        assert spec.base.n_photons == 4
        assert spec.base.eta == 0.8
        assert spec.axis is SweepAxis.GAMMA
        assert (spec.min, spec.max, spec.steps) == (0.0, 4.0, 41)
        assert spec.backend is Backend.EXPM
        assert spec.outputs == frozenset({OutputKind.EIGENVALUES, OutputKind.DIAGNOSTICS})

    def test_defaults_follow_axis(self):
        """Should use the natural range of the default axis."""
        spec = parse_config("n = 2", default_axis=SweepAxis.Z)
        assert (spec.axis, spec.min, spec.max, spec.steps) == (SweepAxis.Z, 0.0, 10.0, 401)

    @pytest.mark.parametrize(
        "text",
        ["eta = 1.5", "n = 0", "steps = 1", "min = 2\nmax = 1", "backend = gpu", "n = four"],
    )
    def test_invalid_values(self, text):
        """Should turn parameter violations into configuration errors."""
        with pytest.raises(ConfigError):
            parse_config(text)


class TestLoadConfig:
    """Test reading configuration files."""

    def test_load(self, tmp_path):
        """Should read a file from disk."""
        path = tmp_path / "run.cfg"
        path.write_text(EXAMPLE, encoding="utf-8")
        assert load_config(path).base.n_photons == 4
        assert load_config_values(path)["eta"] == "0.8"

    def test_missing_file(self, tmp_path):
        """Should let the OSError propagate."""
        with pytest.raises(OSError):
            load_config(tmp_path / "missing.cfg")
