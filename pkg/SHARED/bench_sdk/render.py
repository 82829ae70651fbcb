"""
Hand-emitted SVG 1.1 renderers.

- render_cd_svg(): critical-difference diagram (rank axis with rank 1 on the left,
  one marker per model, clique bars, CD ruler)
- render_cells_svg(): per-cell mean±h bars with error whiskers for one task
- render_pairwise_svg(): per-task matrices of Holm-adjusted pairwise p-values

Coordinates are written at fixed precision and nothing environment-dependent is emitted,
so output is byte-deterministic for given inputs.
"""

from typing import Dict, List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

from pydantic import BaseModel, ConfigDict, Field

from .ranking import CdResult
from .report import BenchmarkReport, CellMark, PairwiseMethod, PairwiseRow, SummaryRow, pairwise_table

__all__ = [
    "PIXELS_PER_RANK",
    "CdDiagramStyle",
    "CdDiagramLayout",
    "CellsPanelStyle",
    "PairwiseMatrixStyle",
    "PairwiseMatrixLayout",
    "SvgDocument",
    "compute_cd_layout",
    "render_cd_svg",
    "render_cells_svg",
    "compute_pairwise_layout",
    "render_pairwise_svg",
]

PIXELS_PER_RANK = 10.0
_COORD = ".6f"


class CdDiagramStyle(BaseModel):
    """Style of the CD diagram; the axis uses 10 px per rank unit times scale_multiplier."""

    model_config = ConfigDict(frozen=True)

    scale_multiplier: float = Field(default=8.0, gt=0)
    precision: int = Field(default=2, ge=0, le=6)
    margin_left: float = 60.0
    margin_right: float = 60.0
    ruler_y: float = 24.0
    axis_y: float = 64.0
    clique_gap: float = 10.0
    clique_spacing: float = 7.0
    clique_padding: float = 4.0
    label_gap: float = 18.0
    label_spacing: float = 16.0
    marker_radius: float = 3.5
    font_size: int = 12


class Tick(BaseModel):
    rank: int
    x: float


class Marker(BaseModel):
    model: str
    mean_rank: float
    x: float
    level: int
    label_y: float


class CliqueBar(BaseModel):
    members: Tuple[str, ...]
    x1: float
    x2: float
    y: float


class CdDiagramLayout(BaseModel):
    """
    Geometry of a CD diagram.

    x(rank) = origin_x + (rank - rank_min) * pixels_per_rank. Markers sit at exactly that
    position; clique bars span [x(min rank), x(max rank)] widened by the end padding on both
    sides; the ruler is cd * pixels_per_rank long.
    """

    width: float
    height: float
    axis_range: Tuple[int, int]
    origin_x: float
    pixels_per_rank: float
    axis_y: float
    ticks: List[Tick]
    markers: List[Marker]
    clique_bars: List[CliqueBar]
    ruler: Tuple[float, float, float]
    ruler_label: str

    def x_of(self, rank: float) -> float:
        return self.origin_x + (rank - self.axis_range[0]) * self.pixels_per_rank

    def rank_of(self, x: float) -> float:
        return self.axis_range[0] + (x - self.origin_x) / self.pixels_per_rank


class SvgDocument:
    """Minimal SVG 1.1 text builder."""

    def __init__(self, width: float, height: float, css: str = ""):
        self.width = width
        self.height = height
        self.parts: List[str] = []
        self.css = css

    @staticmethod
    def _f(value: float) -> str:
        return format(value, _COORD)

    def line(self, x1: float, y1: float, x2: float, y2: float, css_class: str) -> None:
        f = self._f
        self.parts.append(
            f'<line class="{css_class}" x1="{f(x1)}" y1="{f(y1)}" x2="{f(x2)}" y2="{f(y2)}"/>'
        )

    def circle(self, cx: float, cy: float, r: float, css_class: str, title: str = "") -> None:
        f = self._f
        body = f"<title>{escape(title)}</title>" if title else ""
        self.parts.append(
            f'<circle class="{css_class}" cx="{f(cx)}" cy="{f(cy)}" r="{f(r)}">{body}</circle>'
        )

    def rect(self, x: float, y: float, width: float, height: float, css_class: str) -> None:
        f = self._f
        self.parts.append(
            f'<rect class="{css_class}" x="{f(x)}" y="{f(y)}" width="{f(width)}" height="{f(height)}"/>'
        )

    def text(self, x: float, y: float, string: str, css_class: str, anchor: str = "middle") -> None:
        f = self._f
        self.parts.append(
            f'<text class="{css_class}" x="{f(x)}" y="{f(y)}" text-anchor="{anchor}">{escape(string)}</text>'
        )

    def get_svg(self) -> str:
        w, h = self._f(self.width), self._f(self.height)
        header = (
            '<?xml version="1.0" standalone="no"?>\n'
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" '
            '"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">\n'
            f'<svg version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" '
            'xmlns="http://www.w3.org/2000/svg">\n'
        )
        style = f"<style>{self.css}</style>\n" if self.css else ""
        return header + style + "\n".join(self.parts) + "\n</svg>\n"


# ============================================================================
# CD DIAGRAM
# ============================================================================

_CD_CSS = (
    ".axis{stroke:#000;stroke-width:1}.tick{stroke:#000;stroke-width:1}"
    ".marker{fill:#000}.leader{stroke:#888;stroke-width:0.5}"
    ".clique{stroke:#000;stroke-width:3}.ruler{stroke:#000;stroke-width:1.5}"
    "text{font-family:sans-serif;font-size:12px}"
)


def _ruler_label(cd: CdResult, precision: int) -> str:
    return f"CD_{cd.alpha:g} = {cd.cd:.{precision}f}"


def compute_cd_layout(cd: CdResult, style: Optional[CdDiagramStyle] = None) -> CdDiagramLayout:
    """Place ticks, markers, staggered labels, clique bars and the CD ruler."""
    style = style or CdDiagramStyle()
    ppr = PIXELS_PER_RANK * style.scale_multiplier
    rank_max = max(cd.k, 2)
    origin = style.margin_left

    def x_of(rank: float) -> float:
        return origin + (rank - 1) * ppr

    clique_base = style.axis_y + style.clique_gap
    bars: List[CliqueBar] = []
    for i, clique in enumerate(cd.cliques):
        ranks = [cd.mean_ranks[j] for j in clique]
        bars.append(
            CliqueBar(
                members=tuple(cd.models[j] for j in clique),
                x1=x_of(min(ranks)) - style.clique_padding,
                x2=x_of(max(ranks)) + style.clique_padding,
                y=clique_base + i * style.clique_spacing,
            )
        )

    label_base = clique_base + len(bars) * style.clique_spacing + style.label_gap
    order = sorted(range(len(cd.models)), key=lambda j: (cd.mean_ranks[j], j))
    markers: List[Marker] = []
    for position, j in enumerate(order):
        level = position % 2
        markers.append(
            Marker(
                model=cd.models[j],
                mean_rank=cd.mean_ranks[j],
                x=x_of(cd.mean_ranks[j]),
                level=level,
                label_y=label_base + level * style.label_spacing,
            )
        )

    width = origin + (rank_max - 1) * ppr + style.margin_right
    height = label_base + 2 * style.label_spacing
    return CdDiagramLayout(
        width=width,
        height=height,
        axis_range=(1, rank_max),
        origin_x=origin,
        pixels_per_rank=ppr,
        axis_y=style.axis_y,
        ticks=[Tick(rank=r, x=x_of(r)) for r in range(1, rank_max + 1)],
        markers=markers,
        clique_bars=bars,
        ruler=(origin, origin + cd.cd * ppr, style.ruler_y),
        ruler_label=_ruler_label(cd, style.precision),
    )


def render_cd_svg(cd: CdResult, style: Optional[CdDiagramStyle] = None) -> str:
    """
    Render a CD diagram as a standalone SVG 1.1 document.

    Elements carry classes: "marker" (one circle per model, cx on the rank axis),
    "clique" (one line per clique), "ruler" and "tick".
    """
    style = style or CdDiagramStyle()
    layout = compute_cd_layout(cd, style)
    svg = SvgDocument(layout.width, layout.height, _CD_CSS)

    x1, x2, ry = layout.ruler
    svg.line(x1, ry, x2, ry, "ruler")
    svg.line(x1, ry - 4, x1, ry + 4, "ruler")
    svg.line(x2, ry - 4, x2, ry + 4, "ruler")
    svg.text((x1 + x2) / 2, ry - 7, layout.ruler_label, "ruler-label")

    axis_left = layout.ticks[0].x
    axis_right = layout.ticks[-1].x
    svg.line(axis_left, layout.axis_y, axis_right, layout.axis_y, "axis")
    for tick in layout.ticks:
        svg.line(tick.x, layout.axis_y - 5, tick.x, layout.axis_y, "tick")
        svg.text(tick.x, layout.axis_y - 8, str(tick.rank), "tick-label")

    for bar in layout.clique_bars:
        svg.line(bar.x1, bar.y, bar.x2, bar.y, "clique")

    for marker in layout.markers:
        label = f"{marker.model} ({marker.mean_rank:.{style.precision}f})"
        svg.line(marker.x, layout.axis_y, marker.x, marker.label_y - style.font_size, "leader")
        svg.circle(marker.x, layout.axis_y, style.marker_radius, "marker", title=label)
        svg.text(marker.x, marker.label_y, label, "label")

    return svg.get_svg()


# ============================================================================
# PER-CELL PANEL
# ============================================================================


class CellsPanelStyle(BaseModel):
    model_config = ConfigDict(frozen=True)

    bar_width: float = 36.0
    bar_gap: float = 24.0
    plot_height: float = 200.0
    margin_left: float = 56.0
    margin_top: float = 24.0
    margin_bottom: float = 40.0
    cap_width: float = 10.0
    precision: int = 3


_CELLS_CSS = (
    ".bar{fill:#c8c8c8;stroke:#000;stroke-width:0.5}.bar.winner{fill:#f0e68c;stroke-width:1.5}"
    ".bar.tie{fill:#efdecd}.whisker{stroke:#000;stroke-width:1}.axis{stroke:#000;stroke-width:1}"
    "text{font-family:sans-serif;font-size:11px}"
)


def _padded_range(lo: float, hi: float) -> Tuple[float, float]:
    """Data range widened by 10% of its span on both sides (or of |value| when flat)."""
    span = hi - lo
    if span <= 0:
        span = max(abs(lo), 1.0)
    pad = 0.1 * span
    return lo - pad, hi + pad


def render_cells_svg(rows: Sequence[SummaryRow], style: Optional[CellsPanelStyle] = None) -> str:
    """
    Render one task's cells as bars with mean±h whiskers.

    Incompatible rows are skipped. A zero half-width draws a single tick. Winner and tie
    bars get the "winner" / "tie" classes. The y-axis spans the whiskers plus 10% padding,
    so bars rise from 0 only when 0 is inside that range.
    """
    style = style or CellsPanelStyle()
    cells = [r for r in rows if r.mark is not CellMark.INCOMPATIBLE and r.mean is not None]
    lows = [r.mean - r.halfwidth for r in cells] or [0.0]
    highs = [r.mean + r.halfwidth for r in cells] or [0.0]
    y_lo, y_hi = _padded_range(min(lows), max(highs))

    def y_of(value: float) -> float:
        return style.margin_top + (y_hi - value) / (y_hi - y_lo) * style.plot_height

    n = max(len(cells), 1)
    width = style.margin_left + n * (style.bar_width + style.bar_gap) + style.bar_gap
    height = style.margin_top + style.plot_height + style.margin_bottom
    svg = SvgDocument(width, height, _CELLS_CSS)

    baseline = y_of(max(y_lo, 0.0)) if y_lo < 0 <= y_hi else y_of(y_lo)
    base_value = 0.0 if y_lo < 0 <= y_hi else y_lo
    svg.line(style.margin_left, style.margin_top, style.margin_left, style.margin_top + style.plot_height, "axis")
    svg.line(style.margin_left, baseline, width - style.bar_gap / 2, baseline, "axis")
    for value in (y_lo, y_hi):
        svg.text(style.margin_left - 6, y_of(value) + 4, f"{value:.{style.precision}f}", "y-label", "end")
    if rows:
        svg.text(width / 2, style.margin_top - 8, rows[0].task, "title")

    for i, row in enumerate(cells):
        x = style.margin_left + style.bar_gap + i * (style.bar_width + style.bar_gap)
        cx = x + style.bar_width / 2
        top = y_of(max(row.mean, base_value))
        bottom = y_of(min(row.mean, base_value))
        css = "bar" if row.mark is CellMark.PLAIN else f"bar {row.mark.value}"
        svg.rect(x, top, style.bar_width, max(bottom - top, 0.0), css)

        half_cap = style.cap_width / 2
        if row.halfwidth == 0:
            svg.line(cx - half_cap, y_of(row.mean), cx + half_cap, y_of(row.mean), "whisker tick")
        else:
            y_up, y_down = y_of(row.mean + row.halfwidth), y_of(row.mean - row.halfwidth)
            svg.line(cx, y_up, cx, y_down, "whisker")
            svg.line(cx - half_cap, y_up, cx + half_cap, y_up, "whisker cap")
            svg.line(cx - half_cap, y_down, cx + half_cap, y_down, "whisker cap")
        svg.text(cx, style.margin_top + style.plot_height + 16, row.model, "x-label")
        svg.text(cx, y_of(row.mean + row.halfwidth) - 6, row.text, "value-label")

    return svg.get_svg()


# ============================================================================
# PAIRWISE P-VALUE MATRIX
# ============================================================================


class PairwiseMatrixStyle(BaseModel):
    model_config = ConfigDict(frozen=True)

    cell_size: float = Field(default=44.0, gt=0)
    label_width: float = 72.0
    header_height: float = 40.0
    caption_height: float = 20.0
    panel_gap: float = 32.0
    margin: float = 16.0
    precision: int = Field(default=3, ge=0, le=6)


class MatrixCell(BaseModel):
    """One off-diagonal entry; (row, col) and (col, row) carry the same adjusted p."""

    row: int
    col: int
    model_a: str
    model_b: str
    p_holm: float
    significant: bool
    x: float
    y: float


class MatrixPanel(BaseModel):
    task: str
    models: Tuple[str, ...]
    x: float
    y: float
    grid_x: float
    grid_y: float
    cells: List[MatrixCell]


class PairwiseMatrixLayout(BaseModel):
    """
    Geometry of the pairwise p-value figure: one k_t x k_t panel per task, left to right.

    The entry at (i, j) sits at (grid_x + j * cell_size, grid_y + i * cell_size). Its value
    is the Holm-adjusted p of the selected method; "both" shows the larger of the two, so
    an entry is significant exactly when pairwise_table() says so.
    """

    method: str
    alpha: float
    cell_size: float
    width: float
    height: float
    panels: List[MatrixPanel]


def _method_p(method: str, p_t: float, p_w: float) -> float:
    return {"t": p_t, "wilcoxon": p_w, "both": max(p_t, p_w)}[method]


def compute_pairwise_layout(
    report: BenchmarkReport,
    method: Optional[PairwiseMethod] = None,
    style: Optional[PairwiseMatrixStyle] = None,
) -> PairwiseMatrixLayout:
    """
    Lay out the Holm-adjusted p-value matrix of every task with at least one pair.

    method defaults to report.config.pairwise_method.

    Raises:
        InvalidArgumentError: If method is not t, wilcoxon or both
    """
    style = style or PairwiseMatrixStyle()
    method = method or report.config.pairwise_method
    rows = pairwise_table(report, method)
    size = style.cell_size

    by_task: Dict[str, List[PairwiseRow]] = {}
    for row in rows:
        by_task.setdefault(row.task, []).append(row)

    panels: List[MatrixPanel] = []
    x = style.margin
    for task, task_rows in by_task.items():
        models: List[str] = []
        for row in task_rows:
            for name in (row.model_a, row.model_b):
                if name not in models:
                    models.append(name)
        index = {name: i for i, name in enumerate(models)}
        grid_x = x + style.label_width
        grid_y = style.margin + style.header_height
        cells: List[MatrixCell] = []
        for row in task_rows:
            p = _method_p(method, row.p_holm_t, row.p_holm_w)
            a, b = index[row.model_a], index[row.model_b]
            for i, j in ((a, b), (b, a)):
                cells.append(
                    MatrixCell(
                        row=i,
                        col=j,
                        model_a=row.model_a,
                        model_b=row.model_b,
                        p_holm=p,
                        significant=row.significant,
                        x=grid_x + j * size,
                        y=grid_y + i * size,
                    )
                )
        cells.sort(key=lambda c: (c.row, c.col))
        panels.append(
            MatrixPanel(
                task=task, models=tuple(models), x=x, y=style.margin, grid_x=grid_x, grid_y=grid_y, cells=cells
            )
        )
        x = grid_x + len(models) * size + style.panel_gap

    k_max = max((len(p.models) for p in panels), default=0)
    width = (x - style.panel_gap if panels else x) + style.margin
    height = style.margin + style.header_height + k_max * size + style.caption_height + style.margin
    return PairwiseMatrixLayout(
        method=method,
        alpha=report.config.alpha,
        cell_size=size,
        width=width,
        height=height,
        panels=panels,
    )


_PAIRWISE_CSS = (
    ".pcell{stroke:#fff;stroke-width:1}.pcell.ns{fill:#e8e8e8}.pcell.sig{fill:#f4a582}"
    ".pcell.strong{fill:#ca0020}.diag{fill:#fff;stroke:#ccc;stroke-width:1}"
    "text{font-family:sans-serif;font-size:11px}.p-label{font-size:10px}"
)


def render_pairwise_svg(
    report: BenchmarkReport,
    method: Optional[PairwiseMethod] = None,
    style: Optional[PairwiseMatrixStyle] = None,
) -> str:
    """
    Render the pairwise significance figure as a standalone SVG 1.1 document.

    Off-diagonal rects carry "pcell" plus "ns" (p >= alpha), "sig" or "strong"
    (p < alpha / 10), and print the adjusted p; the diagonal is drawn as "diag".
    """
    style = style or PairwiseMatrixStyle()
    layout = compute_pairwise_layout(report, method, style)
    svg = SvgDocument(layout.width, layout.height, _PAIRWISE_CSS)
    size = layout.cell_size
    svg.text(
        style.margin,
        layout.height - style.margin,
        f"Holm-adjusted p ({layout.method}), alpha = {layout.alpha:g}",
        "caption",
        "start",
    )

    for panel in layout.panels:
        k = len(panel.models)
        svg.text(panel.grid_x + k * size / 2, panel.y + 14, panel.task, "panel-title")
        for i, name in enumerate(panel.models):
            svg.text(panel.grid_x - 6, panel.grid_y + (i + 0.5) * size + 4, name, "row-label", "end")
            svg.text(panel.grid_x + (i + 0.5) * size, panel.grid_y - 6, name, "col-label")
            svg.rect(panel.grid_x + i * size, panel.grid_y + i * size, size, size, "diag")
        for cell in panel.cells:
            if not cell.significant:
                css = "pcell ns"
            elif cell.p_holm < layout.alpha / 10:
                css = "pcell strong"
            else:
                css = "pcell sig"
            svg.rect(cell.x, cell.y, size, size, css)
            svg.text(cell.x + size / 2, cell.y + size / 2 + 4, f"{cell.p_holm:.{style.precision}f}", "p-label")

    return svg.get_svg()
