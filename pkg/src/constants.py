"""
Centralised constants for the MOPS toolkit.

Check names, weight family tags, report formats and default paths live here
so they can be imported by any module without circular dependencies.
"""

# ── Version ──────────────────────────────────────────────────────
APP_VERSION = "0.4.0"

# ── Default paths ────────────────────────────────────────────────
DEFAULT_CONFIG_PATH = "config.json"
DEFAULT_REPORT_DIR = "reports"

# ── Weight families ──────────────────────────────────────────────
FAMILY_SQUARE = "square-legendre"
FAMILY_BALL = "ball"
FAMILY_SIMPLEX = "simplex"
FAMILY_CUSTOM = "custom"
WEIGHT_FAMILIES = (FAMILY_SQUARE, FAMILY_BALL, FAMILY_SIMPLEX, FAMILY_CUSTOM)

# ── Checks (dependency order) ────────────────────────────────────
CHECK_NAMES = (
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
)

# ── Report formats ───────────────────────────────────────────────
REPORT_FORMATS = ("json", "csv", "latex")
STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_SKIPPED = "skipped"

# ── Parity classes of the quadratic decomposition ────────────────
PARITY_CLASSES = ((0, 0), (1, 1), (1, 0), (0, 1))

# ── Logging ──────────────────────────────────────────────────────
LOG_MAX_BYTES = 10 * 1024 * 1024  # 10 MB
LOG_BACKUP_COUNT = 5
LOG_ROOT_NAME = "mops"
