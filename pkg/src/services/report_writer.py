"""
Report writer service.

Serialises a :class:`RunReport` (or the output of ``compute``) as JSON, CSV
or LaTeX. Rationals are always written as ``"p/q"`` strings; the LaTeX
renderer converts them through sympy.
"""

import csv
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import sympy

from ..errors import IoFailure
from ..observability import get_logger
from ..ratlinalg import parse_rational
from .check_runner import RunReport

logger = get_logger("report_writer")

_EXTENSIONS = {"json": ".json", "csv": ".csv", "latex": ".tex"}
_CSV_COLUMNS = ["check", "identity", "indices", "status", "witness"]
_TEX_SPECIALS = {"_": r"\_", "&": r"\&", "%": r"\%", "#": r"\#", "^": r"\^{}", "$": r"\$"}


def target_path(path: Union[str, Path], fmt: str, stem: str = "mops-report") -> Path:
    """A path with a suffix is used as is; anything else is treated as a directory."""
    p = Path(path)
    if p.suffix:
        return p
    return p / f"{stem}{_EXTENSIONS[fmt]}"


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %s", path)
    return path


# ── Renderers ────────────────────────────────────────────────────


def render_json(data: Dict[str, Any]) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def render_csv(report: RunReport) -> str:
    """Header plus one row per check record."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for r in report.records:
        writer.writerow(
            [
                r.check,
                r.identity,
                json.dumps(r.indices, sort_keys=True),
                r.status,
                json.dumps(r.witness, sort_keys=True) if r.witness is not None else "",
            ]
        )
    return buf.getvalue()


def _tex(text: str) -> str:
    return "".join(_TEX_SPECIALS.get(ch, ch) for ch in text)


def latex_matrix(rows: Sequence[Sequence[str]]) -> str:
    """``"p/q"`` rows as a LaTeX bmatrix; empty shapes render as ``\\emptyset``."""
    if not rows or not rows[0]:
        return r"\emptyset"
    m = sympy.Matrix([[sympy.Rational(str(parse_rational(v))) for v in row] for row in rows])
    return sympy.latex(m, mat_delim="[", mat_str="bmatrix")  # type: ignore[no-any-return]


def _summary_table(report: RunReport) -> List[str]:
    lines = [
        r"\begin{tabular}{lrrl}",
        r"\hline",
        r"check & records & failed & status \\",
        r"\hline",
    ]
    for name, status in report.checks.items():
        recs = report.records_for(name)
        failed = sum(1 for r in recs if r.failed)
        lines.append(rf"\texttt{{{_tex(name)}}} & {len(recs)} & {failed} & {status} \\")
    lines += [r"\hline", r"\end{tabular}"]
    return lines


def _correspondence_table(rows: List[Dict[str, Any]]) -> List[str]:
    lines = [
        r"\begin{longtable}{llll}",
        r"\hline",
        r"symmetric entry & factor & small polynomial & weight \\",
        r"\hline",
    ]
    for row in rows:
        poly = row.get("polynomial_latex") or _tex(row["polynomial"])
        lines.append(
            rf"${row['symmetric']}$ & ${row['factor']}$ & ${poly}$ & \texttt{{{_tex(row['weight'])}}} \\"
        )
    lines += [r"\hline", r"\end{longtable}"]
    return lines


def _coefficient_lines(entries: List[Dict[str, Any]]) -> List[str]:
    lines = [r"\subsection*{Recurrence coefficients of the small families}"]
    for e in entries:
        if e["kind"] == "recurrence":
            lines.append(
                rf"\[ {e['family']}: \quad \hat{{D}}_{{{e['n']},{e['k']}}} = {latex_matrix(e['D'])}, \quad "
                rf"\hat{{C}}_{{{e['n']},{e['k']}}} = {latex_matrix(e['C'])} \]"
            )
    lines += ["", r"\subsection*{Christoffel connection matrices}"]
    for e in entries:
        if e["kind"] == "connection":
            pair = e["pair"].replace("->", r" \to ")
            lines.append(
                rf"\[ {pair}: \quad M_{{{e['n']},{e['k']}}} = {latex_matrix(e['M'])}, \quad "
                rf"N_{{{e['n']},{e['k']}}} = {latex_matrix(e['N'])} \]"
            )
    return lines


def render_latex(report: RunReport) -> str:
    """Summary table, plus the case-study tables and coefficients when a case study ran."""
    lines = [
        r"\documentclass{article}",
        r"\usepackage{amsmath,longtable}",
        r"\begin{document}",
        rf"\section*{{MOPS report ({report.status})}}",
        rf"Weight: \texttt{{{_tex(json.dumps(report.config.get('weight', {})))}}}, "
        rf"$N = {report.config.get('max_degree', '?')}$.",
        "",
    ]
    lines += _summary_table(report)
    if report.case_study:
        lines += [
            "",
            r"\subsection*{Symmetric entries and small families}",
            "Moments are normalized to total mass one; constant factors of the weights "
            "and the Jacobian of $(x,y)\\mapsto(x^2,y^2)$ cancel.",
            "",
        ]
        lines += _correspondence_table(report.case_study)
    if report.case_coefficients:
        lines.append("")
        lines += _coefficient_lines(report.case_coefficients)
    lines += [r"\end{document}", ""]
    return "\n".join(lines)


def render_family_latex(data: Dict[str, Any]) -> str:
    """Recurrence matrices of a ``compute`` result."""
    family = data["family"]
    lines = [
        r"\documentclass{article}",
        r"\usepackage{amsmath}",
        r"\begin{document}",
        rf"\section*{{Three-term coefficients of \texttt{{{_tex(family['label'])}}}}}",
    ]
    for entry in family.get("recurrence", []):
        n, k = entry["n"], entry["k"]
        lines.append(
            rf"\[ D_{{{n},{k}}} = {latex_matrix(entry['D'])}, \quad "
            rf"C_{{{n},{k}}} = {latex_matrix(entry['C'])} \]"
        )
    lines += [r"\end{document}", ""]
    return "\n".join(lines)


def render_family_csv(data: Dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "k", "D", "C"])
    for entry in data["family"].get("recurrence", []):
        writer.writerow([entry["n"], entry["k"], json.dumps(entry["D"]), json.dumps(entry["C"])])
    return buf.getvalue()


# ── Public API ───────────────────────────────────────────────────


def emit(report: RunReport, fmt: str, path: Union[str, Path]) -> Path:
    """Write ``report`` in ``fmt`` and return the file written.

    Raises:
        IoFailure: if the file cannot be written.
    """
    if fmt not in _EXTENSIONS:
        raise ValueError(f"unknown report format {fmt!r}")
    target = target_path(path, fmt)
    if fmt == "json":
        text = render_json(report.to_dict())
    elif fmt == "csv":
        text = render_csv(report)
    else:
        text = render_latex(report)
    return _write(target, text)


def emit_family(data: Dict[str, Any], fmt: str, path: Union[str, Path]) -> Path:
    if fmt not in _EXTENSIONS:
        raise ValueError(f"unknown report format {fmt!r}")
    target = target_path(path, fmt, stem="mops-family")
    if fmt == "json":
        text = render_json(data)
    elif fmt == "csv":
        text = render_family_csv(data)
    else:
        text = render_family_latex(data)
    return _write(target, text)


def load_report(path: Union[str, Path]) -> RunReport:
    """Re-ingest a JSON report.

    Raises:
        IoFailure: if the file is missing or not a report.
    """
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
        return RunReport.from_dict(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise IoFailure(f"cannot load report {p}: {exc}") from exc
