"""
Check runner service.

Builds the families a run needs once, then executes the requested checks in
dependency order. A failing identity or a domain error never stops the
suite: it becomes a failed record, and anything unexpected is additionally
captured by the :class:`ErrorTracker`.

Depths derive from the symmetric degree N of the config: orthogonality, the
J–L identities and the converse run to N; decomposition-based checks use the
small degree m = ⌊(N−2)/2⌋; the Bäcklund comparison runs to ⌊(N−3)/2⌋. The
case study uses ``case_study.degree`` when it is set and m otherwise.
"""

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List

from ..backlund import (
    GammaSequence,
    case_study_coefficients,
    gamma_sequence,
    verify_backlund,
    verify_big_family_relations,
    verify_block_factors,
    verify_christoffel_connections,
    verify_short_relations,
    verify_small_three_term,
)
from ..config import RunConfig
from ..constants import APP_VERSION, FAMILY_BALL, STATUS_FAIL, STATUS_PASS, STATUS_SKIPPED
from ..errors import MopsError
from ..momentbase import MomentFunctional, from_weight_spec, quad_pullback, quad_pushforward
from ..mops import (
    MopsFamily,
    build_mops,
    family_to_dict,
    rebuild_from_recurrence,
    verify_gamma_rank,
    verify_orthogonality,
    verify_symmetric_recurrence,
)
from ..observability import ErrorTracker, MetricsCollector, clear_log_context, get_logger, set_log_context
from ..quadratic import QuadDecomposition, assemble_symmetric, decompose, verify_decomposition, xu_case_study
from ..structmat import verify_JL_identities, verify_L_shift, verify_structure
from ..verification import CheckRecord, compare_vectors, error_record, skipped_record

logger = get_logger("check_runner")


@dataclass
class RunReport:
    """Per-check records plus the environment echo and timing."""

    config: Dict[str, Any]
    checks: Dict[str, str]
    records: List[CheckRecord]
    case_study: List[Dict[str, Any]] = field(default_factory=list)
    case_coefficients: List[Dict[str, Any]] = field(default_factory=list)
    timing: Dict[str, Any] = field(default_factory=dict)
    version: str = APP_VERSION

    @property
    def status(self) -> str:
        return STATUS_FAIL if any(r.failed for r in self.records) else STATUS_PASS

    @property
    def exit_code(self) -> int:
        return 0 if self.status == STATUS_PASS else 1

    def records_for(self, check: str) -> List[CheckRecord]:
        return [r for r in self.records if r.check == check]

    def to_dict(self, *, with_timing: bool = True) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "version": self.version,
            "status": self.status,
            "config": self.config,
            "checks": dict(self.checks),
            "records": [r.to_dict() for r in self.records],
        }
        if self.case_study:
            data["case_study"] = self.case_study
        if self.case_coefficients:
            data["case_coefficients"] = self.case_coefficients
        if with_timing:
            data["timing"] = self.timing
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunReport":
        return cls(
            config=data["config"],
            checks=dict(data["checks"]),
            records=[CheckRecord.from_dict(r) for r in data["records"]],
            case_study=list(data.get("case_study", [])),
            case_coefficients=list(data.get("case_coefficients", [])),
            timing=dict(data.get("timing", {})),
            version=data.get("version", APP_VERSION),
        )


def _summarize(records: List[CheckRecord]) -> str:
    if any(r.failed for r in records):
        return STATUS_FAIL
    if records and all(r.status == STATUS_SKIPPED for r in records):
        return STATUS_SKIPPED
    return STATUS_PASS


class CheckRunner:
    """Executes the checks of one :class:`RunConfig`."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.N = config.max_degree
        self.small_degree = (self.N - 2) // 2
        self.backlund_degree = (self.N - 3) // 2
        self.case_degree = (
            config.case_study_degree if config.case_study_degree is not None else self.small_degree
        )
        self.metrics = MetricsCollector()
        self._cache: Dict[str, Any] = {}
        self._failed: Dict[str, MopsError] = {}
        self._case_rows: List[Dict[str, Any]] = []
        self._case_coefficients: List[Dict[str, Any]] = []
        self._handlers: Dict[str, Callable[[], List[CheckRecord]]] = {
            "jl_identities": self._check_jl,
            "orthogonality": self._check_orthogonality,
            "decomposition": self._check_decomposition,
            "converse_roundtrip": self._check_converse,
            "backlund": self._check_backlund,
            "gamma_hat": self._check_gamma_hat,
            "big_family_relations": self._check_big_relations,
            "christoffel_connection": self._check_christoffel,
            "lu_factorization": self._check_lu,
            "xu_case_study": self._check_xu,
        }

    # ── Shared artefacts ─────────────────────────────────────────

    def _cached(self, key: str, builder: Callable[[], Any]) -> Any:
        """Build once; a domain error is remembered and re-raised for dependants."""
        if key in self._failed:
            raise self._failed[key]
        if key not in self._cache:
            try:
                self._cache[key] = builder()
            except MopsError as exc:
                self._failed[key] = exc
                raise
        return self._cache[key]

    @property
    def functional(self) -> MomentFunctional:
        return self._cached("functional", lambda: from_weight_spec(self.config.weight))

    @property
    def symmetric_functional(self) -> MomentFunctional:
        F = self.functional
        return F if F.is_xy_symmetric else self._cached("pullback", lambda: quad_pullback(F))

    @property
    def family(self) -> MopsFamily:
        return self._cached("family", lambda: build_mops(self.functional, self.N))

    @property
    def symmetric_family(self) -> MopsFamily:
        if self.functional.is_xy_symmetric:
            return self.family
        return self._cached("symmetric", lambda: build_mops(self.symmetric_functional, self.N))

    @property
    def decomposition(self) -> QuadDecomposition:
        return self._cached(
            "decomposition", lambda: decompose(self.symmetric_family, self.small_degree)
        )

    @property
    def gammas(self) -> GammaSequence:
        return self._cached("gammas", lambda: gamma_sequence(self.symmetric_family, self.N))

    # ── Checks ───────────────────────────────────────────────────

    def _check_jl(self) -> List[CheckRecord]:
        return verify_JL_identities(self.N) + verify_L_shift(self.N) + verify_structure(self.N)

    def _check_orthogonality(self) -> List[CheckRecord]:
        records = verify_orthogonality(self.family)
        symfam = self.symmetric_family
        if symfam is not self.family:
            records += verify_orthogonality(symfam)
        for n in range(self.N):
            for k in (1, 2):
                records.append(verify_symmetric_recurrence(symfam, n, k))
        for n in range(1, self.N + 1):
            for k in (1, 2):
                records.append(verify_gamma_rank(symfam, n, k))
        rebuilt = rebuild_from_recurrence(symfam)
        for n, vec in enumerate(rebuilt):
            records.append(
                compare_vectors(
                    "orthogonality", "S_n rebuilt from Gamma", {"n": n}, symfam.slice(n), vec
                )
            )
        return records

    def _check_decomposition(self) -> List[CheckRecord]:
        return verify_decomposition(self.decomposition)

    def _check_converse(self) -> List[CheckRecord]:
        symfam = self.symmetric_family
        G = quad_pushforward(symfam.functional, 0, 0)
        assembled = assemble_symmetric(G, self.N)
        records = list(assembled.records)
        for n in range(self.N + 1):
            records.append(
                compare_vectors(
                    "converse_roundtrip",
                    "assembled S_n = S_n",
                    {"n": n},
                    assembled.symmetric.slice(n),
                    symfam.slice(n),
                )
            )
        return records

    def _check_backlund(self) -> List[CheckRecord]:
        n = self.backlund_degree
        return verify_backlund(self.gammas, self.decomposition, n) + verify_small_three_term(
            self.gammas, self.decomposition, n
        )

    def _check_gamma_hat(self) -> List[CheckRecord]:
        return verify_short_relations(self.gammas, self.decomposition, self.small_degree)

    def _check_big_relations(self) -> List[CheckRecord]:
        return verify_big_family_relations(self.gammas, self.decomposition, self.small_degree)

    def _check_christoffel(self) -> List[CheckRecord]:
        return verify_christoffel_connections(self.gammas, self.decomposition, self.small_degree)

    def _check_lu(self) -> List[CheckRecord]:
        return verify_block_factors(self.gammas, self.decomposition, self.small_degree)

    def _check_xu(self) -> List[CheckRecord]:
        weight = self.config.weight
        mu = weight.mu if weight.family == FAMILY_BALL and weight.mu is not None else self.config.case_study_mu
        study = xu_case_study(mu, self.case_degree)
        self._case_rows = study.rows
        self._case_coefficients = case_study_coefficients(study.decomposition, self.case_degree)
        return study.records

    def _required_degree(self, name: str) -> int:
        if name in ("jl_identities", "orthogonality", "converse_roundtrip"):
            return 0
        if name == "backlund":
            return self.backlund_degree
        if name == "xu_case_study":
            return self.case_degree
        if name in ("christoffel_connection", "lu_factorization"):
            return self.small_degree - 1
        return self.small_degree

    # ── Execution ────────────────────────────────────────────────

    def run_check(self, name: str) -> List[CheckRecord]:
        """Run one check; never raises."""
        if self._required_degree(name) < 0:
            return [skipped_record(name, f"max_degree {self.N} is too small for {name}")]
        set_log_context(check=name)
        try:
            records = self._handlers[name]()
        except MopsError as exc:
            logger.warning("check %s aborted: %s", name, exc, extra={"error_type": type(exc).__name__})
            records = [error_record(name, "check aborted", {}, exc)]
        except Exception as exc:  # noqa: BLE001
            ErrorTracker().capture_exception(exc, extra={"check": name})
            records = [
                CheckRecord(
                    name,
                    "unexpected error",
                    {},
                    STATUS_FAIL,
                    {"error_type": type(exc).__name__, "message": str(exc)},
                )
            ]
        finally:
            clear_log_context()
        if not records:
            records = [skipped_record(name, "no identities at this depth")]
        return records

    def run(self) -> RunReport:
        records: List[CheckRecord] = []
        checks: Dict[str, str] = {}
        durations: Dict[str, float] = {}
        self.metrics.gauge_set("max_degree", self.N)
        for name in self.config.ordered_checks():
            start = time.perf_counter()
            with self.metrics.timer("check_duration_ms", labels={"check": name}):
                found = self.run_check(name)
            durations[name] = round((time.perf_counter() - start) * 1000.0, 2)
            status = _summarize(found)
            checks[name] = status
            self.metrics.inc("checks_total", labels={"status": status})
            self.metrics.gauge_set("check_records", len(found), labels={"check": name})
            records.extend(found)
            logger.info(
                "check %s: %s (%d records)",
                name,
                status,
                len(found),
                extra={"check": name, "status": status, "duration_ms": durations[name]},
            )
        tracker = ErrorTracker()
        errors = tracker.error_summary()
        errors["recent"] = [
            {key: err[key] for key in ("error_type", "message", "context", "fingerprint")}
            for err in tracker.recent_errors(limit=10)
        ]
        report = RunReport(
            config=self.config.echo(),
            checks=checks,
            records=records,
            case_study=self._case_rows,
            case_coefficients=self._case_coefficients,
            timing={"checks_ms": durations, "metrics": self.metrics.snapshot(), "errors": errors},
        )
        logger.info("run finished: %s", report.status, extra={"status": report.status})
        return report

    def compute(self) -> Dict[str, Any]:
        """MOPS of the configured weight with every D/C matrix."""
        return {
            "version": APP_VERSION,
            "config": self.config.echo(),
            "family": family_to_dict(self.family, with_coefficients=True),
        }


def run(config: RunConfig) -> RunReport:
    return CheckRunner(config).run()

