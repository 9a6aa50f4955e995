"""
Configuration loading and validation for MOPS runs.

Centralises config parsing so it happens once at startup: the CLI loads the
JSON file, reports every problem from :func:`validate_config`, then builds a
typed :class:`RunConfig` with :func:`parse_run_config`.
"""

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from .constants import (
    CHECK_NAMES,
    DEFAULT_CONFIG_PATH,
    DEFAULT_REPORT_DIR,
    FAMILY_BALL,
    FAMILY_CUSTOM,
    FAMILY_SIMPLEX,
    REPORT_FORMATS,
    WEIGHT_FAMILIES,
)
from .errors import ConfigError, ConfigInvalid
from .momentbase import WeightSpec
from .ratlinalg import format_rational, parse_rational

# Required top-level keys and the sub-keys that must exist within them.
_REQUIRED_SCHEMA: Dict[str, List[str]] = {
    "weight": ["family"],
    "output": ["format", "path"],
}

_REQUIRED_TOP_KEYS: List[str] = ["weight", "max_degree", "checks", "output"]

# Family parameters that must be rationals > -1.
_FAMILY_PARAMS: Dict[str, List[str]] = {
    FAMILY_BALL: ["mu"],
    FAMILY_SIMPLEX: ["a", "b", "c"],
}


@dataclass
class RunConfig:
    """Typed view of a validated config file."""

    weight: WeightSpec
    max_degree: int
    checks: List[str]
    output_format: str = "json"
    output_path: str = ""
    case_study_mu: Fraction = Fraction(0)
    # small degree of the case-study tables; derived from max_degree when unset
    case_study_degree: Optional[int] = None
    debug: bool = False
    json_console: Optional[bool] = None
    source: Dict[str, Any] = field(default_factory=dict, repr=False, compare=False)

    def ordered_checks(self) -> List[str]:
        """Requested checks in dependency order."""
        return [name for name in CHECK_NAMES if name in self.checks]

    def echo(self) -> Dict[str, Any]:
        """Environment echo for reports."""
        return {
            "weight": self.weight.to_dict(),
            "max_degree": self.max_degree,
            "checks": self.ordered_checks(),
            "case_study_mu": format_rational(self.case_study_mu),
            "case_study_degree": self.case_study_degree,
        }


def _locate(config_path: str) -> Path:
    """Absolute paths win, then the working directory, then the project root."""
    candidate = Path(config_path)
    if candidate.is_absolute():
        return candidate
    if candidate.exists():
        return candidate.resolve()
    return Path(__file__).parent.parent / config_path


def load_config(config_path: str = DEFAULT_CONFIG_PATH) -> Dict[str, Any]:
    """
    Load configuration from a JSON file and resolve ``${ENV_VAR:-default}``
    placeholders in all string values.

    Args:
        config_path: Path to the config file (absolute, or relative to the
            working directory or the project root)

    Returns:
        Fully-resolved configuration dictionary.

    Raises:
        ConfigError: If the file cannot be read or parsed.
    """
    load_dotenv()
    full_path = _locate(config_path)

    if not full_path.exists():
        raise ConfigError(f"Configuration file not found: {full_path}")

    try:
        with open(full_path, "r") as f:
            config = json.load(f)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid JSON in {full_path}: {exc}") from exc

    if not isinstance(config, dict):
        raise ConfigError(f"Top level of {full_path} must be a JSON object")
    return _resolve(config)


def validate_config(config: Dict[str, Any]) -> List[str]:
    """
    Validate a config dict against the required schema.

    Returns:
        A list of human-readable error strings.  Empty means valid.
    """
    errors: List[str] = []

    for key in _REQUIRED_TOP_KEYS:
        if key not in config:
            errors.append(f"Missing required config section: '{key}'")

    for section, sub_keys in _REQUIRED_SCHEMA.items():
        if not isinstance(config.get(section), dict):
            continue  # already reported above
        for sub in sub_keys:
            if sub not in config[section]:
                errors.append(f"Missing required key '{sub}' in config section '{section}'")

    max_degree = config.get("max_degree")
    if "max_degree" in config and (
        isinstance(max_degree, bool) or not isinstance(max_degree, int) or max_degree < 1
    ):
        errors.append(f"max_degree must be an integer >= 1, got {max_degree!r}")

    checks = config.get("checks")
    if "checks" in config:
        if not isinstance(checks, list) or not checks:
            errors.append("checks must be a non-empty list")
        else:
            for name in checks:
                if name not in CHECK_NAMES:
                    errors.append(f"Unknown check '{name}'")

    output = config.get("output")
    if isinstance(output, dict) and "format" in output:
        if output["format"] not in REPORT_FORMATS:
            errors.append(f"output.format must be one of {', '.join(REPORT_FORMATS)}")
        path = str(output.get("path", ""))
        if path.startswith("${"):
            errors.append(f"output.path is an unresolved placeholder: '{path}'")

    weight = config.get("weight")
    if isinstance(weight, dict):
        errors.extend(_weight_problems(weight))

    for section in ("case_study", "logging"):
        if section in config and not isinstance(config[section], dict):
            errors.append(f"{section} must be an object")

    case_study = config.get("case_study")
    if isinstance(case_study, dict):
        mu = case_study.get("mu")
        if mu is not None:
            problem = _rational_problem(mu, "case_study.mu")
            if problem:
                errors.append(problem)
        degree = case_study.get("degree")
        if degree is not None and not _is_degree(degree, 0):
            errors.append(f"case_study.degree must be an integer >= 0, got {degree!r}")

    return errors


def parse_run_config(config: Dict[str, Any]) -> RunConfig:
    """
    Build a :class:`RunConfig` from a loaded config dict.

    Raises:
        ConfigInvalid: carrying the dotted path of the first bad field.
    """
    for key in _REQUIRED_TOP_KEYS:
        if key not in config:
            raise ConfigInvalid(key, "missing")

    max_degree = config["max_degree"]
    if isinstance(max_degree, bool) or not isinstance(max_degree, int) or max_degree < 1:
        raise ConfigInvalid("max_degree", f"must be an integer >= 1, got {max_degree!r}")

    checks = config["checks"]
    if not isinstance(checks, list) or not checks:
        raise ConfigInvalid("checks", "must be a non-empty list")
    for pos, name in enumerate(checks):
        if name not in CHECK_NAMES:
            raise ConfigInvalid(f"checks[{pos}]", f"unknown check {name!r}")

    if not isinstance(config["weight"], dict):
        raise ConfigInvalid("weight", "must be an object")
    weight = WeightSpec.from_dict(config["weight"])

    output = config["output"]
    if not isinstance(output, dict):
        raise ConfigInvalid("output", "must be an object")
    fmt = output.get("format", "json")
    if fmt not in REPORT_FORMATS:
        raise ConfigInvalid("output.format", f"must be one of {', '.join(REPORT_FORMATS)}")

    case_study = config.get("case_study", {})
    if not isinstance(case_study, dict):
        raise ConfigInvalid("case_study", "must be an object")
    try:
        case_mu = parse_rational(case_study.get("mu", "0"))
    except ValueError as exc:
        raise ConfigInvalid("case_study.mu", str(exc)) from exc
    if case_mu <= -1:
        raise ConfigInvalid("case_study.mu", f"must be > -1, got {format_rational(case_mu)}")
    case_degree = case_study.get("degree")
    if case_degree is not None and not _is_degree(case_degree, 0):
        raise ConfigInvalid("case_study.degree", f"must be an integer >= 0, got {case_degree!r}")

    logging_cfg = config.get("logging", {})
    if not isinstance(logging_cfg, dict):
        raise ConfigInvalid("logging", "must be an object")
    return RunConfig(
        weight=weight,
        max_degree=max_degree,
        checks=list(dict.fromkeys(checks)),
        output_format=fmt,
        output_path=str(output.get("path") or DEFAULT_REPORT_DIR),
        case_study_mu=case_mu,
        case_study_degree=case_degree,
        debug=bool(logging_cfg.get("debug", False)),
        json_console=logging_cfg.get("json_console"),
        source=config,
    )


# ── Private helpers ──────────────────────────────────────────────

_PLACEHOLDER_RE = re.compile(r"\$\{(\w+)(?::-([^}]*))?\}")


def _resolve(obj: Any) -> Any:
    """Recursively resolve ``${ENV_VAR:-default}`` in string values."""
    if isinstance(obj, str):
        return _PLACEHOLDER_RE.sub(_replace_match, obj)
    elif isinstance(obj, dict):
        return {k: _resolve(v) for k, v in obj.items()}
    elif isinstance(obj, list):
        return [_resolve(v) for v in obj]
    return obj


def _replace_match(m: re.Match) -> str:
    var = m.group(1)
    default = m.group(2) if m.group(2) is not None else ""
    return os.environ.get(var, default)


def _is_degree(value: Any, minimum: int) -> bool:
    return isinstance(value, int) and not isinstance(value, bool) and value >= minimum


def _rational_problem(value: Any, path: str) -> Optional[str]:
    try:
        q = parse_rational(value)
    except ValueError as exc:
        return f"{path}: {exc}"
    if q <= -1:
        return f"{path} must be > -1, got {format_rational(q)}"
    return None


def _weight_problems(weight: Dict[str, Any]) -> List[str]:
    family = weight.get("family")
    if family not in WEIGHT_FAMILIES:
        return [f"weight.family must be one of {', '.join(WEIGHT_FAMILIES)}, got {family!r}"]
    errors: List[str] = []
    for name in _FAMILY_PARAMS.get(family, []):
        if weight.get(name) is None:
            errors.append(f"weight.{name} is required for the {family} family")
            continue
        problem = _rational_problem(weight[name], f"weight.{name}")
        if problem:
            errors.append(problem)
    if family == FAMILY_CUSTOM:
        table = weight.get("moments")
        if not isinstance(table, list) or not table:
            errors.append("weight.moments must be a non-empty list of [h, k, \"p/q\"]")
        else:
            for pos, entry in enumerate(table):
                if not isinstance(entry, list) or len(entry) != 3:
                    errors.append(f"weight.moments[{pos}] must be [h, k, \"p/q\"]")
                    continue
                try:
                    parse_rational(entry[2])
                except ValueError as exc:
                    errors.append(f"weight.moments[{pos}]: {exc}")
    return errors
