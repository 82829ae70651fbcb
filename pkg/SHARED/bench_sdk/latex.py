"""
LaTeX exporter for the summary (task x model) and pairwise (per-task family) tables.

Output is a booktabs tabular body; byte-identical for a given report and options.
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from .models import MetricDirection
from .protocol import InvalidArgumentError
from .report import BenchmarkReport, CellMark, PairwiseMethod, mark_cells, pairwise_table
from .utils import format_delta, format_metric, format_pvalue, latex_escape

__all__ = ["LatexOptions", "to_latex", "summary_to_latex", "pairwise_to_latex"]

_ARROWS = {
    MetricDirection.HIGHER_IS_BETTER: "$\\uparrow$",
    MetricDirection.LOWER_IS_BETTER: "$\\downarrow$",
}


class LatexOptions(BaseModel):
    """
    Exporter options.

    winner_macro / tie_macro name one-argument macros wrapped around the cell
    (e.g. "\\winnercell" defined as a khaki \\cellcolor). Defaults: no colors, bold winner.
    """

    model_config = ConfigDict(frozen=True)

    winner_macro: Optional[str] = Field(default=None, description="Macro wrapped around winner cells")
    tie_macro: Optional[str] = Field(default=None, description="Macro wrapped around tie cells")
    bold_winner: bool = True
    na_marker: str = "n/a"
    precision: int = Field(default=3, ge=0, le=6)
    pairwise_method: Optional[PairwiseMethod] = None


def _cell_tex(mean: float, halfwidth: float, precision: int, bold: bool) -> str:
    body = f"{format_metric(mean, precision)}_{{\\pm {format_metric(halfwidth, precision)}}}"
    if bold:
        return f"$\\mathbf{{{body}}}$"
    return f"${body}$"


def _wrap(macro: Optional[str], text: str) -> str:
    return f"{macro}{{{text}}}" if macro else text


def summary_to_latex(report: BenchmarkReport, options: LatexOptions) -> str:
    """One row per task, one column per model; n/a where the pair is incompatible."""
    models = list(report.tensor.models)
    lines: List[str] = [
        "\\begin{tabular}{ll" + "c" * len(models) + "}",
        "\\toprule",
        " & ".join(["Category", "Task"] + [latex_escape(m) for m in models]) + " \\\\",
        "\\midrule",
    ]
    for spec in report.tensor.tasks:
        marks = mark_cells(report, spec.name)
        cells = [latex_escape(spec.category), f"{latex_escape(spec.name)} {_ARROWS[spec.direction]}"]
        for model in models:
            mark = marks[model]
            cell = report.cell(spec.name, model)
            if mark is CellMark.INCOMPATIBLE or cell is None:
                cells.append(options.na_marker)
                continue
            text = _cell_tex(
                cell.mean,
                cell.halfwidth,
                options.precision,
                bold=mark is CellMark.WINNER and options.bold_winner,
            )
            if mark is CellMark.WINNER:
                text = _wrap(options.winner_macro, text)
            elif mark is CellMark.TIE:
                text = _wrap(options.tie_macro, text)
            cells.append(text)
        lines.append(" & ".join(cells) + " \\\\")
    lines += ["\\bottomrule", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def pairwise_to_latex(report: BenchmarkReport, options: LatexOptions) -> str:
    """One block per task with its C(k, 2) rows; columns follow the pairwise method."""
    method = options.pairwise_method or report.config.pairwise_method
    show_t = method in ("t", "both")
    show_w = method in ("wilcoxon", "both")

    header = ["Comparison", "$\\Delta\\mu$"]
    if show_t:
        header.append("$p_{\\text{Holm}}^{\\,t}$")
    if show_w:
        header.append("$p_{\\text{Holm}}^{\\,W}$")
    if method == "both":
        header.append("Agree")
    n_cols = len(header)

    lines: List[str] = [
        "\\begin{tabular}{l" + "r" * (n_cols - 1) + "}",
        "\\toprule",
        " & ".join(header) + " \\\\",
    ]
    rows = pairwise_table(report, method)
    for family in report.pairwise:
        family_rows = [r for r in rows if r.task == family.task]
        if not family_rows:
            continue
        lines.append("\\midrule")
        lines.append(f"\\multicolumn{{{n_cols}}}{{l}}{{\\textit{{{latex_escape(family.task)}}}}} \\\\")
        for row in family_rows:
            cells = [
                f"{latex_escape(row.model_a)} vs {latex_escape(row.model_b)}",
                f"${format_delta(row.delta_mu, options.precision)}$",
            ]
            if show_t:
                cells.append(format_pvalue(row.p_holm_t))
            if show_w:
                cells.append(format_pvalue(row.p_holm_w))
            if method == "both":
                cells.append("\\checkmark" if row.agree else "$\\times$")
            lines.append(" & ".join(cells) + " \\\\")
    lines += ["\\bottomrule", "\\end{tabular}"]
    return "\n".join(lines) + "\n"


def to_latex(
    report: BenchmarkReport,
    which: Literal["summary", "pairwise"],
    options: Optional[LatexOptions] = None,
) -> str:
    """Export the summary or pairwise table as LaTeX."""
    options = options or LatexOptions()
    if which == "summary":
        return summary_to_latex(report, options)
    if which == "pairwise":
        return pairwise_to_latex(report, options)
    raise InvalidArgumentError(f"Unknown table: {which}", details={"which": which})
