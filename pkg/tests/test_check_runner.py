"""Tests for the check runner service: depths, error isolation, reports."""

import pytest

import src.services.check_runner as check_runner_module
from src.config import parse_run_config
from src.constants import CHECK_NAMES, STATUS_FAIL, STATUS_PASS, STATUS_SKIPPED
from src.observability import ErrorTracker, MetricsCollector
from src.services.check_runner import CheckRunner, RunReport, run

BAD_CUSTOM = {
    "family": "custom",
    "symmetry": "xy",
    "moments": [[0, 0, "1"], [2, 0, "-1"], [0, 2, "1"]],
}


def _config(run_config_dict, **changes):
    run_config_dict.update(changes)
    return parse_run_config(run_config_dict)


@pytest.fixture(scope="module")
def full_report(tmp_path_factory):
    """Every check on the square at N = 6."""
    MetricsCollector.reset()
    ErrorTracker.reset()
    cfg = parse_run_config(
        {
            "weight": {"family": "square-legendre"},
            "max_degree": 6,
            "checks": list(CHECK_NAMES),
            "output": {"format": "json", "path": str(tmp_path_factory.mktemp("reports"))},
            "case_study": {"mu": "0"},
        }
    )
    return run(cfg)


# ── Full suite ───────────────────────────────────────────────────


class TestFullRun:
    @pytest.mark.integration
    def test_every_check_passes(self, full_report):
        assert full_report.status == STATUS_PASS
        assert full_report.exit_code == 0
        assert list(full_report.checks) == list(CHECK_NAMES)
        assert set(full_report.checks.values()) == {STATUS_PASS}

    @pytest.mark.integration
    def test_each_check_has_records(self, full_report):
        for name in CHECK_NAMES:
            assert full_report.records_for(name), name

    @pytest.mark.integration
    def test_case_study_rows_are_kept(self, full_report):
        assert full_report.case_study
        assert any(row["symmetric"] == "S_{2,0}" for row in full_report.case_study)

    @pytest.mark.integration
    def test_timing_and_metrics(self, full_report):
        assert set(full_report.timing["checks_ms"]) == set(CHECK_NAMES)
        counters = full_report.timing["metrics"]["counters"]
        assert counters['checks_total{status="pass"}'] == len(CHECK_NAMES)
        histograms = full_report.timing["metrics"]["histograms"]
        assert histograms['check_duration_ms{check="backlund"}']["count"] == 1

    @pytest.mark.integration
    def test_gamma_rank_is_reported(self, full_report):
        ranks = [r for r in full_report.records_for("orthogonality") if r.identity == "rank Gamma_n,k = n"]
        assert len(ranks) == 6 * 2
        assert all(r.status == STATUS_PASS for r in ranks)
        assert {r.indices["n"] for r in ranks} == set(range(1, 7))

    @pytest.mark.integration
    def test_structure_records_in_jl_check(self, full_report):
        identities = {r.identity for r in full_report.records_for("jl_identities")}
        assert "rank L_n,k = n+1" in identities
        assert "J_n^T J_n diagonal with trace n+1" in identities

    @pytest.mark.integration
    def test_record_gauges_and_error_summary(self, full_report):
        gauges = full_report.timing["metrics"]["gauges"]
        assert gauges["max_degree"] == 6
        for name in CHECK_NAMES:
            assert gauges[f'check_records{{check="{name}"}}'] == len(full_report.records_for(name))
        errors = full_report.timing["errors"]
        assert errors["total_captured"] == 0
        assert errors["recent"] == []

    @pytest.mark.integration
    def test_case_coefficients(self, full_report):
        # small degree 2: four families, n = 0..2, two variables; two pairs per variable, n = 0..1
        kinds = [e["kind"] for e in full_report.case_coefficients]
        assert kinds.count("recurrence") == 4 * 3 * 2
        assert kinds.count("connection") == 2 * 2 * 2
        first = next(
            e
            for e in full_report.case_coefficients
            if e["kind"] == "connection" and e["n"] == 0 and e["k"] == 1
        )
        assert first["pair"] == "(0,0)->(1,0)"
        assert first["M"] == [[]]
        assert len(first["N"]) == 1

    @pytest.mark.integration
    def test_dict_round_trip(self, full_report):
        data = full_report.to_dict()
        assert data["status"] == STATUS_PASS
        assert data["config"]["max_degree"] == 6
        assert RunReport.from_dict(data) == full_report
        assert "timing" not in full_report.to_dict(with_timing=False)


# ── Depths ───────────────────────────────────────────────────────


class TestDepths:
    @pytest.mark.unit
    def test_derived_degrees(self, run_config_dict):
        runner = CheckRunner(_config(run_config_dict, max_degree=7))
        assert runner.small_degree == 2
        assert runner.backlund_degree == 2

    @pytest.mark.unit
    def test_small_degree_skips_decomposition_checks(self, run_config_dict):
        report = CheckRunner(_config(run_config_dict, max_degree=1)).run()
        assert report.checks["jl_identities"] == STATUS_PASS
        assert report.checks["orthogonality"] == STATUS_PASS
        for name in ("decomposition", "backlund", "gamma_hat", "lu_factorization", "xu_case_study"):
            assert report.checks[name] == STATUS_SKIPPED
            (record,) = report.records_for(name)
            assert record.identity == "skipped"
            assert "too small" in record.witness["reason"]
        assert report.status == STATUS_PASS

    @pytest.mark.unit
    def test_depth_two_runs_gamma_hat_but_not_backlund(self, run_config_dict):
        runner = CheckRunner(_config(run_config_dict, max_degree=2))
        assert runner.run_check("backlund")[0].status == STATUS_SKIPPED
        assert runner.run_check("christoffel_connection")[0].status == STATUS_SKIPPED
        records = runner.run_check("decomposition")
        assert records
        assert all(r.status == STATUS_PASS for r in records)

    @pytest.mark.unit
    def test_case_study_degree_overrides_derived_depth(self, run_config_dict):
        cfg = _config(
            run_config_dict,
            max_degree=1,
            checks=["xu_case_study"],
            case_study={"mu": "0", "degree": 1},
        )
        runner = CheckRunner(cfg)
        assert runner.small_degree == -1
        assert runner.case_degree == 1
        report = runner.run()
        assert report.checks["xu_case_study"] == STATUS_PASS
        row = next(r for r in report.case_study if r["symmetric"] == "S_{2,0}")
        assert row["polynomial"] == "u - 1/4"
        assert report.config["case_study_degree"] == 1


# ── Error isolation ──────────────────────────────────────────────


class TestErrorIsolation:
    @pytest.mark.unit
    def test_domain_error_becomes_failed_record(self, run_config_dict):
        cfg = _config(run_config_dict, weight=BAD_CUSTOM, max_degree=1, checks=["orthogonality"])
        report = CheckRunner(cfg).run()
        assert report.status == STATUS_FAIL
        assert report.exit_code == 1
        (record,) = report.records_for("orthogonality")
        assert record.identity == "check aborted"
        assert record.witness["error_type"] == "NotQuasiDefinite"
        assert record.witness["degree"] == 1

    @pytest.mark.unit
    def test_failed_family_is_built_once(self, run_config_dict, mocker):
        spy = mocker.spy(check_runner_module, "build_mops")
        cfg = _config(
            run_config_dict,
            weight=BAD_CUSTOM,
            max_degree=1,
            checks=["orthogonality", "converse_roundtrip"],
        )
        report = CheckRunner(cfg).run()
        assert spy.call_count == 1
        for name in ("orthogonality", "converse_roundtrip"):
            assert report.checks[name] == STATUS_FAIL
            assert report.records_for(name)[0].witness["error_type"] == "NotQuasiDefinite"

    @pytest.mark.unit
    def test_unexpected_error_is_tracked(self, run_config_dict, mocker):
        mocker.patch.object(CheckRunner, "_check_jl", side_effect=RuntimeError("boom"))
        cfg = _config(run_config_dict, max_degree=2, checks=["jl_identities", "orthogonality"])
        report = CheckRunner(cfg).run()

        (record,) = report.records_for("jl_identities")
        assert record.identity == "unexpected error"
        assert record.witness == {"error_type": "RuntimeError", "message": "boom"}
        assert report.checks["orthogonality"] == STATUS_PASS

        tracker = ErrorTracker()
        assert tracker.error_summary()["total_captured"] == 1
        assert tracker.recent_errors()[0]["context"]["check"] == "jl_identities"
        errors = report.timing["errors"]
        assert errors["total_captured"] == 1
        assert errors["recent"][0]["error_type"] == "RuntimeError"
        assert errors["recent"][0]["context"]["check"] == "jl_identities"
        assert "traceback" not in errors["recent"][0]

    @pytest.mark.unit
    def test_log_context_is_cleared(self, run_config_dict):
        from src.observability import get_log_context

        CheckRunner(_config(run_config_dict, max_degree=1, checks=["orthogonality"])).run()
        assert "check" not in get_log_context()


# ── Other weights ────────────────────────────────────────────────


class TestOtherWeights:
    @pytest.mark.integration
    def test_simplex_goes_through_pullback(self, run_config_dict):
        weight = {"family": "simplex", "a": "-1/2", "b": "-1/2", "c": "0"}
        runner = CheckRunner(_config(run_config_dict, weight=weight, max_degree=4))
        assert not runner.functional.is_xy_symmetric
        assert runner.symmetric_family is not runner.family
        report = runner.run()
        assert report.status == STATUS_PASS

    @pytest.mark.unit
    def test_ball_weight_drives_case_study(self, run_config_dict):
        weight = {"family": "ball", "mu": "1/2"}
        cfg = _config(run_config_dict, weight=weight, max_degree=4, checks=["xu_case_study"])
        report = CheckRunner(cfg).run()
        assert report.case_study
        assert all(row["weight"].endswith("(1-u-v)^(1/2)") for row in report.case_study)


# ── compute ──────────────────────────────────────────────────────


class TestCompute:
    @pytest.mark.unit
    def test_compute_dumps_family_and_coefficients(self, run_config_dict):
        data = CheckRunner(_config(run_config_dict, max_degree=2)).compute()
        assert data["config"]["max_degree"] == 2
        family = data["family"]
        assert family["label"] == "square-legendre"
        assert family["max_degree"] == 2
        assert len(family["recurrence"]) == 2 * 3

    @pytest.mark.unit
    def test_compute_propagates_domain_errors(self, run_config_dict):
        from src.errors import NotQuasiDefinite

        runner = CheckRunner(_config(run_config_dict, weight=BAD_CUSTOM, max_degree=1))
        with pytest.raises(NotQuasiDefinite):
            runner.compute()
