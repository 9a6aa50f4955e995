"""Tests for the command-line entry point."""

import json

import pytest

from src.cli import build_parser, main
from src.errors import IoFailure


@pytest.fixture
def config_file(tmp_path, run_config_dict):
    """Write the config (with changes) to disk and return its path."""

    def _write(**changes):
        run_config_dict.update(changes)
        path = tmp_path / "config.json"
        path.write_text(json.dumps(run_config_dict))
        return str(path)

    return _write


# ── Argument parsing ─────────────────────────────────────────────


class TestParser:
    @pytest.mark.unit
    def test_verbs_and_overrides(self):
        args = build_parser().parse_args(["verify", "--max-degree", "4", "--format", "csv", "--debug"])
        assert args.command == "verify"
        assert args.max_degree == 4
        assert args.format == "csv"
        assert args.debug is True

    @pytest.mark.unit
    def test_verb_is_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    @pytest.mark.unit
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["--version"])
        assert info.value.code == 0
        assert "mops" in capsys.readouterr().out


# ── verify / casestudy / compute ─────────────────────────────────


class TestCommands:
    @pytest.mark.integration
    def test_verify_writes_report(self, config_file, tmp_path, capsys):
        code = main(["verify", "--config", config_file(), "--max-degree", "2"])
        out = capsys.readouterr().out
        assert code == 0
        assert "orthogonality            pass" in out
        assert "backlund                 skipped" in out
        report = json.loads((tmp_path / "reports" / "mops-report.json").read_text())
        assert report["status"] == "pass"
        assert report["config"]["max_degree"] == 2

    @pytest.mark.integration
    def test_out_and_format_overrides(self, config_file, tmp_path, capsys):
        target = tmp_path / "elsewhere" / "run.csv"
        code = main(
            ["verify", "--config", config_file(), "--max-degree", "1", "--format", "csv", "--out", str(target)]
        )
        assert code == 0
        assert target.read_text().startswith("check,identity,indices,status,witness")
        assert f"report: {target}" in capsys.readouterr().out

    @pytest.mark.integration
    def test_casestudy_writes_latex(self, config_file, tmp_path):
        code = main(["casestudy", "--config", config_file(), "--max-degree", "2"])
        assert code == 0
        text = (tmp_path / "reports" / "mops-report.tex").read_text()
        assert "S_{2,0}" in text
        assert r"u - \frac{1}{4}" in text
        assert r"\hat{D}_{2,1}" in text
        assert r"M_{1,2}" in text

    @pytest.mark.slow
    def test_verify_full_suite_at_degree_eight(self, config_file, tmp_path, capsys):
        code = main(["verify", "--config", config_file(max_degree=8)])
        out = capsys.readouterr().out
        assert code == 0
        report = json.loads((tmp_path / "reports" / "mops-report.json").read_text())
        assert report["status"] == "pass"
        assert report["config"]["max_degree"] == 8
        assert set(report["checks"].values()) == {"pass"}
        for name in report["checks"]:
            assert f"{name:<24} pass" in out

    @pytest.mark.integration
    def test_json_report_is_deterministic(self, config_file, tmp_path):
        path = config_file(max_degree=4)
        first, second = tmp_path / "first.json", tmp_path / "second.json"
        assert main(["verify", "--config", path, "--out", str(first)]) == 0
        assert main(["verify", "--config", path, "--out", str(second)]) == 0
        reports = [json.loads(p.read_text()) for p in (first, second)]
        for report in reports:
            report.pop("timing")
        assert reports[0] == reports[1]
        assert first.read_text().count("\n") > 1

    @pytest.mark.unit
    def test_unexpected_error_is_printed(self, config_file, mocker, capsys):
        from src.services.check_runner import CheckRunner

        mocker.patch.object(CheckRunner, "_check_jl", side_effect=RuntimeError("boom"))
        path = config_file(max_degree=1, checks=["jl_identities"])
        assert main(["verify", "--config", path]) == 1
        assert main(["verify", "--config", path]) == 1
        err = capsys.readouterr().err
        assert err.count("Unexpected RuntimeError in jl_identities: boom") == 2

    @pytest.mark.unit
    def test_casestudy_degree_is_not_the_symmetric_degree(self, config_file, tmp_path):
        code = main(
            ["casestudy", "--config", config_file(max_degree=1), "--max-degree", "1", "--format", "json"]
        )
        assert code == 0
        report = json.loads((tmp_path / "reports" / "mops-report.json").read_text())
        assert report["config"]["max_degree"] == 1
        assert report["config"]["case_study_degree"] == 1
        assert report["checks"] == {"xu_case_study": "pass"}
        assert any(row["polynomial"] == "u - 1/4" for row in report["case_study"])

    @pytest.mark.unit
    def test_compute_prints_path(self, config_file, tmp_path, capsys):
        code = main(["compute", "--config", config_file(), "--max-degree", "2"])
        assert code == 0
        path = tmp_path / "reports" / "mops-family.json"
        assert str(path) in capsys.readouterr().out
        data = json.loads(path.read_text())
        assert data["family"]["max_degree"] == 2

    @pytest.mark.unit
    def test_failed_identity_exits_one(self, config_file):
        weight = {"family": "custom", "symmetry": "xy", "moments": [[0, 0, "1"], [2, 0, "-1"], [0, 2, "1"]]}
        path = config_file(weight=weight, max_degree=1, checks=["orthogonality"])
        assert main(["verify", "--config", path]) == 1

    @pytest.mark.unit
    def test_compute_domain_error_exits_one(self, config_file, capsys):
        weight = {"family": "custom", "symmetry": "xy", "moments": [[0, 0, "1"], [2, 0, "-1"], [0, 2, "1"]]}
        path = config_file(weight=weight, max_degree=1)
        assert main(["compute", "--config", path]) == 1
        assert "not quasi-definite" in capsys.readouterr().err


# ── Failure exits ────────────────────────────────────────────────


class TestExitCodes:
    @pytest.mark.unit
    def test_invalid_config_exits_two(self, config_file, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--config", config_file(max_degree=0)])
        assert info.value.code == 2
        assert "max_degree" in capsys.readouterr().err

    @pytest.mark.unit
    def test_missing_config_exits_two(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--config", str(tmp_path / "missing.json")])
        assert info.value.code == 2
        assert "not found" in capsys.readouterr().err

    @pytest.mark.unit
    def test_bad_override_exits_two(self, config_file):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--config", config_file(), "--max-degree", "0"])
        assert info.value.code == 2

    @pytest.mark.unit
    def test_unwritable_report_exits_three(self, config_file, mocker, capsys):
        mocker.patch("src.cli.emit", side_effect=IoFailure("disk full"))
        assert main(["verify", "--config", config_file(), "--max-degree", "1"]) == 3
        assert "disk full" in capsys.readouterr().err

    @pytest.mark.unit
    def test_case_study_must_be_an_object(self, config_file, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "--config", config_file(case_study="x")])
        assert info.value.code == 2
        assert "case_study must be an object" in capsys.readouterr().err
