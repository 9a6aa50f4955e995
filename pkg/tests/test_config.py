"""Tests for the config module: loading, placeholder resolution, validation, parsing."""

import json
from fractions import Fraction

import pytest

from src.config import ConfigError, RunConfig, load_config, parse_run_config, validate_config
from src.constants import CHECK_NAMES
from src.errors import ConfigInvalid


@pytest.fixture
def write_config(tmp_path):
    """Helper that writes a config dict (or raw text) to tmp_path and returns the path."""

    def _write(cfg, name: str = "config.json"):
        path = tmp_path / name
        path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
        return str(path)

    return _write


# ── load_config ──────────────────────────────────────────────────


class TestLoadConfig:
    @pytest.mark.unit
    def test_loads_project_config(self):
        """The shipped config.json should load and validate cleanly."""
        result = load_config()
        assert result["weight"]["family"] == "square-legendre"
        assert validate_config(result) == []

    @pytest.mark.unit
    def test_resolves_env_placeholders(self, monkeypatch, write_config):
        """${ENV_VAR:-default} placeholders should be resolved."""
        monkeypatch.setenv("MOPS_TEST_OUT", "/custom/reports")
        path = write_config({"output": {"path": "${MOPS_TEST_OUT:-reports}"}, "list": ["${MOPS_TEST_OUT}"]})
        result = load_config(path)
        assert result["output"]["path"] == "/custom/reports"
        assert result["list"] == ["/custom/reports"]

    @pytest.mark.unit
    def test_placeholder_default(self, monkeypatch, write_config):
        monkeypatch.delenv("MOPS_UNSET_VAR", raising=False)
        path = write_config({"output": {"path": "${MOPS_UNSET_VAR:-reports}"}})
        assert load_config(path)["output"]["path"] == "reports"

    @pytest.mark.unit
    def test_missing_file_raises_config_error(self):
        """load_config should raise ConfigError for missing files."""
        with pytest.raises(ConfigError, match="not found"):
            load_config("nonexistent_file_that_does_not_exist.json")

    @pytest.mark.unit
    def test_invalid_json(self, write_config):
        with pytest.raises(ConfigError, match="Invalid JSON"):
            load_config(write_config("{not json"))

    @pytest.mark.unit
    def test_top_level_must_be_object(self, write_config):
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(write_config("[1, 2]"))


# ── validate_config ──────────────────────────────────────────────


class TestValidateConfig:
    @pytest.mark.unit
    def test_valid_config_returns_no_errors(self, run_config_dict):
        """A complete config should validate without errors."""
        assert validate_config(run_config_dict) == []

    @pytest.mark.unit
    def test_missing_sections(self):
        errors = validate_config({})
        assert len(errors) == 4
        assert any("'weight'" in e for e in errors)
        assert any("'max_degree'" in e for e in errors)

    @pytest.mark.unit
    def test_missing_sub_key(self, run_config_dict):
        del run_config_dict["output"]["format"]
        errors = validate_config(run_config_dict)
        assert any("'format'" in e and "'output'" in e for e in errors)

    @pytest.mark.unit
    @pytest.mark.parametrize("value", [0, -3, True, "8", 2.5])
    def test_bad_max_degree(self, run_config_dict, value):
        run_config_dict["max_degree"] = value
        errors = validate_config(run_config_dict)
        assert any("max_degree" in e for e in errors)

    @pytest.mark.unit
    def test_unknown_check(self, run_config_dict):
        run_config_dict["checks"] = ["orthogonality", "telepathy"]
        assert validate_config(run_config_dict) == ["Unknown check 'telepathy'"]

    @pytest.mark.unit
    def test_empty_checks(self, run_config_dict):
        run_config_dict["checks"] = []
        assert "checks must be a non-empty list" in validate_config(run_config_dict)

    @pytest.mark.unit
    def test_bad_format_and_unresolved_path(self, run_config_dict):
        run_config_dict["output"] = {"format": "xml", "path": "${NOPE}"}
        errors = validate_config(run_config_dict)
        assert any("output.format" in e for e in errors)
        assert any("unresolved placeholder" in e for e in errors)

    @pytest.mark.unit
    def test_weight_problems_reported_together(self, run_config_dict):
        run_config_dict["weight"] = {"family": "simplex", "a": "-1", "b": "x"}
        errors = validate_config(run_config_dict)
        assert "weight.a must be > -1, got -1" in errors
        assert any(e.startswith("weight.b:") for e in errors)
        assert "weight.c is required for the simplex family" in errors

    @pytest.mark.unit
    def test_unknown_family(self, run_config_dict):
        run_config_dict["weight"] = {"family": "torus"}
        errors = validate_config(run_config_dict)
        assert len(errors) == 1
        assert "weight.family" in errors[0]

    @pytest.mark.unit
    def test_custom_moment_table(self, run_config_dict):
        run_config_dict["weight"] = {"family": "custom", "moments": [[0, 0, "1"], [2, 0], [0, 2, "a"]]}
        errors = validate_config(run_config_dict)
        assert 'weight.moments[1] must be [h, k, "p/q"]' in errors
        assert any(e.startswith("weight.moments[2]:") for e in errors)

    @pytest.mark.unit
    def test_case_study_mu(self, run_config_dict):
        run_config_dict["case_study"] = {"mu": "-3/2"}
        assert validate_config(run_config_dict) == ["case_study.mu must be > -1, got -3/2"]

    @pytest.mark.unit
    def test_case_study_must_be_an_object(self, run_config_dict):
        run_config_dict["case_study"] = "x"
        run_config_dict["logging"] = []
        assert validate_config(run_config_dict) == [
            "case_study must be an object",
            "logging must be an object",
        ]

    @pytest.mark.unit
    @pytest.mark.parametrize("degree", [-1, "2", True, 1.5])
    def test_bad_case_study_degree(self, run_config_dict, degree):
        run_config_dict["case_study"] = {"mu": "0", "degree": degree}
        assert validate_config(run_config_dict) == [
            f"case_study.degree must be an integer >= 0, got {degree!r}"
        ]


# ── parse_run_config ─────────────────────────────────────────────


class TestParseRunConfig:
    @pytest.mark.unit
    def test_builds_typed_config(self, run_config_dict, tmp_path):
        cfg = parse_run_config(run_config_dict)
        assert isinstance(cfg, RunConfig)
        assert cfg.max_degree == 6
        assert cfg.weight.family == "square-legendre"
        assert cfg.output_format == "json"
        assert cfg.output_path == str(tmp_path / "reports")
        assert cfg.case_study_mu == Fraction(0)
        assert cfg.debug is False

    @pytest.mark.unit
    def test_checks_are_deduplicated_and_ordered(self, run_config_dict):
        run_config_dict["checks"] = ["lu_factorization", "jl_identities", "lu_factorization"]
        cfg = parse_run_config(run_config_dict)
        assert cfg.checks == ["lu_factorization", "jl_identities"]
        assert cfg.ordered_checks() == ["jl_identities", "lu_factorization"]

    @pytest.mark.unit
    def test_every_check_known(self, run_config_dict):
        cfg = parse_run_config(run_config_dict)
        assert cfg.ordered_checks() == list(CHECK_NAMES)

    @pytest.mark.unit
    def test_echo(self, run_config_dict):
        run_config_dict["weight"] = {"family": "ball", "mu": "2/4"}
        echo = parse_run_config(run_config_dict).echo()
        assert echo["weight"] == {"family": "ball", "mu": "1/2"}
        assert echo["max_degree"] == 6
        assert echo["case_study_mu"] == "0"
        assert echo["case_study_degree"] is None

    @pytest.mark.unit
    def test_case_study_degree(self, run_config_dict):
        run_config_dict["case_study"] = {"mu": "1/2", "degree": 3}
        cfg = parse_run_config(run_config_dict)
        assert cfg.case_study_degree == 3
        assert cfg.case_study_mu == Fraction(1, 2)
        assert cfg.echo()["case_study_degree"] == 3

    @pytest.mark.unit
    def test_logging_section(self, run_config_dict):
        run_config_dict["logging"] = {"debug": True, "json_console": True}
        cfg = parse_run_config(run_config_dict)
        assert cfg.debug is True
        assert cfg.json_console is True

    @pytest.mark.unit
    @pytest.mark.parametrize(
        "mutate, path",
        [
            (lambda c: c.pop("checks"), "checks"),
            (lambda c: c.update(max_degree=0), "max_degree"),
            (lambda c: c.update(checks=["orthogonality", "nope"]), "checks[1]"),
            (lambda c: c.update(weight={"family": "ball", "mu": "-2"}), "weight.mu"),
            (lambda c: c["output"].update(format="pdf"), "output.format"),
            (lambda c: c.update(case_study={"mu": "1/0"}), "case_study.mu"),
            (lambda c: c.update(case_study={"mu": "-1"}), "case_study.mu"),
            (lambda c: c.update(weight="ball"), "weight"),
            (lambda c: c.update(case_study="x"), "case_study"),
            (lambda c: c.update(case_study={"degree": -1}), "case_study.degree"),
            (lambda c: c.update(logging=[]), "logging"),
        ],
    )
    def test_invalid_values_name_the_field(self, run_config_dict, mutate, path):
        mutate(run_config_dict)
        with pytest.raises(ConfigInvalid) as info:
            parse_run_config(run_config_dict)
        assert info.value.path == path
