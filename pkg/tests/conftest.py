"""
Test fixtures and configuration for pytest
"""

import pytest

from src.momentbase import ball, quad_pushforward, square_legendre
from src.mops import build_mops
from src.observability import ErrorTracker, MetricsCollector, clear_log_context
from src.quadratic import decompose

# ── Log isolation ────────────────────────────────────────────────
# Keep test runs from writing into the repository's logs/ directory.


@pytest.fixture(autouse=True)
def _isolated_logs(tmp_path, monkeypatch):
    """Auto-use guard: point MOPS_LOG_DIR at a temp dir and reset singletons."""
    monkeypatch.setenv("MOPS_LOG_DIR", str(tmp_path / "logs"))
    MetricsCollector.reset()
    ErrorTracker.reset()
    yield
    clear_log_context()


# ── Cached families ──────────────────────────────────────────────
# Exact construction is deterministic, so one build per session is enough.


@pytest.fixture(scope="session")
def square():
    """Uniform weight on the square."""
    return square_legendre()


@pytest.fixture(scope="session")
def square_family(square):
    """Square MOPS through degree 8."""
    return build_mops(square, 8, label="square")


@pytest.fixture(scope="session")
def square_decomposition(square_family):
    """Small families of the square up to degree 3."""
    return decompose(square_family, 3)


@pytest.fixture(scope="session")
def square_push(square):
    """Pushforward (0,0) of the square, i.e. the small weight (uv)^(-1/2) on [0,1]²."""
    return quad_pushforward(square, 0, 0)


@pytest.fixture(scope="session")
def ball0():
    return ball(0)


@pytest.fixture(scope="session")
def ball0_family(ball0):
    return build_mops(ball0, 6, label="ball0")


@pytest.fixture
def run_config_dict(tmp_path):
    """A small but complete config: every check at N = 6."""
    return {
        "weight": {"family": "square-legendre"},
        "max_degree": 6,
        "checks": [
            "jl_identities",
            "orthogonality",
            "decomposition",
            "converse_roundtrip",
            "backlund",
            "gamma_hat",
            "big_family_relations",
            "christoffel_connection",
            "lu_factorization",
            "xu_case_study",
        ],
        "output": {"format": "json", "path": str(tmp_path / "reports")},
        "case_study": {"mu": "0"},
    }
