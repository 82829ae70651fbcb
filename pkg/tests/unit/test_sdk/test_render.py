"""
Unit tests for the SVG renderers.
"""

import re
import xml.etree.ElementTree as ET

import pytest

from bench_sdk.config_models import ReportConfig
from bench_sdk.protocol import InvalidArgumentError
from bench_sdk.ranking import CdResult, cd_analysis
from bench_sdk.render import (
    PIXELS_PER_RANK,
    CdDiagramStyle,
    PairwiseMatrixStyle,
    compute_cd_layout,
    compute_pairwise_layout,
    render_cd_svg,
    render_cells_svg,
    render_pairwise_svg,
)
from bench_sdk.report import build_report, pairwise_table, summary_table
from tests.helpers import make_tensor, task

SVG_NS = "{http://www.w3.org/2000/svg}"


def svg_elements(text, tag, css_class):
    root = ET.fromstring(text.split("\n", 2)[2])
    return [e for e in root.iter(f"{SVG_NS}{tag}") if css_class in e.get("class", "").split()]


@pytest.fixture
def demo_cd(demo_tensor) -> CdResult:
    return cd_analysis(demo_tensor, 0.05)


@pytest.mark.unit
class TestCdLayout:
    """Test CD diagram geometry."""

    def test_markers_sit_on_the_rank_axis(self, demo_cd):
        """Test x = origin + (rank - 1) * pixels_per_rank for every model."""
        layout = compute_cd_layout(demo_cd)
        assert layout.pixels_per_rank == PIXELS_PER_RANK * 8.0
        for marker in layout.markers:
            assert marker.x == pytest.approx(layout.x_of(marker.mean_rank))
            assert layout.rank_of(marker.x) == pytest.approx(marker.mean_rank)

    def test_best_model_is_leftmost(self, demo_cd):
        """Test rank 1 sits on the left."""
        layout = compute_cd_layout(demo_cd)
        assert layout.markers[0].model == "SAGE"
        assert [m.x for m in layout.markers] == sorted(m.x for m in layout.markers)

    def test_ruler_length_and_label(self, demo_cd):
        """Test the ruler spans cd ranks."""
        layout = compute_cd_layout(demo_cd)
        x1, x2, _ = layout.ruler
        assert (x2 - x1) / layout.pixels_per_rank == pytest.approx(demo_cd.cd)
        assert layout.ruler_label == "CD_0.05 = 1.48"

    def test_clique_bar_spans_members(self, demo_cd):
        """Test the single demo clique covers ranks 2.1 to 2.9 plus padding."""
        style = CdDiagramStyle()
        layout = compute_cd_layout(demo_cd, style)
        assert len(layout.clique_bars) == 1
        bar = layout.clique_bars[0]
        assert bar.members == ("SAGE", "GCN", "GT", "GAT")
        assert bar.x1 == pytest.approx(layout.x_of(2.1) - style.clique_padding)
        assert bar.x2 == pytest.approx(layout.x_of(2.9) + style.clique_padding)

    def test_scale_multiplier(self, demo_cd):
        """Test the axis stretches with the multiplier."""
        wide = compute_cd_layout(demo_cd, CdDiagramStyle(scale_multiplier=16.0))
        assert wide.pixels_per_rank == 160.0

    def test_labels_are_staggered(self, demo_cd):
        """Test adjacent labels alternate between two rows."""
        levels = [m.level for m in compute_cd_layout(demo_cd).markers]
        assert levels == [0, 1, 0, 1]


@pytest.mark.unit
class TestCdSvg:
    """Test the CD diagram document."""

    def test_one_marker_per_model(self, demo_cd):
        """Test marker circles and clique lines by class."""
        text = render_cd_svg(demo_cd)
        assert len(svg_elements(text, "circle", "marker")) == 4
        assert len(svg_elements(text, "line", "clique")) == 1
        assert len(svg_elements(text, "line", "tick")) == 4

    def test_marker_positions_invert_to_ranks(self, demo_cd):
        """Test the emitted cx values decode back to mean ranks."""
        layout = compute_cd_layout(demo_cd)
        text = render_cd_svg(demo_cd)
        xs = sorted(float(c.get("cx")) for c in svg_elements(text, "circle", "marker"))
        ranks = [layout.rank_of(x) for x in xs]
        assert ranks == pytest.approx(sorted(demo_cd.mean_ranks), abs=1e-6)

    def test_byte_deterministic(self, demo_cd):
        """Test identical input gives identical bytes."""
        assert render_cd_svg(demo_cd) == render_cd_svg(demo_cd)

    def test_fixed_precision_coordinates(self, demo_cd):
        """Test coordinates are written with six decimals."""
        text = render_cd_svg(demo_cd)
        assert all(re.fullmatch(r"-?\d+\.\d{6}", v) for v in re.findall(r'cx="([^"]+)"', text))

    def test_no_cliques(self):
        """Test a diagram where every model is separated."""
        cd = CdResult(
            models=("A", "B"),
            mean_ranks=(1.0, 2.0),
            chi2_friedman=20.0,
            p_friedman=0.0,
            k=2,
            N=20,
            alpha=0.05,
            cd=0.5,
            cliques=(),
        )
        assert svg_elements(render_cd_svg(cd), "line", "clique") == []


@pytest.mark.unit
class TestCellsSvg:
    """Test the per-cell panel."""

    def test_bars_skip_incompatible_models(self, demo_tensor, report_config):
        """Test one bar per present model with winner and tie classes."""
        rows = [r for r in summary_table(build_report(demo_tensor, report_config)) if r.task == "Cora"]
        text = render_cells_svg(rows)
        bars = svg_elements(text, "rect", "bar")
        assert len(bars) == 4
        assert len(svg_elements(text, "rect", "winner")) == 1

    def test_zero_width_cell_draws_a_tick(self, report_config):
        """Test a constant cell draws a tick instead of whiskers."""
        tensor = make_tensor({("t1", "A"): [0.5, 0.5], ("t1", "B"): [0.4, 0.6]}, [task("t1")], ["A", "B"], (0, 1))
        text = render_cells_svg(summary_table(build_report(tensor, report_config)))
        assert len(svg_elements(text, "line", "tick")) == 1
        assert len(svg_elements(text, "line", "cap")) == 2

    def test_empty_rows(self):
        """Test a panel without cells still renders."""
        assert render_cells_svg([]).rstrip().endswith("</svg>")

    def test_y_range_follows_the_data(self, report_config):
        """Test metrics clustered near 0.9 get a zoomed axis and readable whiskers."""
        tensor = make_tensor(
            {("auc", "A"): [0.89, 0.90, 0.91], ("auc", "B"): [0.90, 0.91, 0.92]}, [task("auc")], ["A", "B"], (0, 1, 2)
        )
        rows = summary_table(build_report(tensor, report_config))
        text = render_cells_svg(rows)
        y_labels = [float(e.text) for e in svg_elements(text, "text", "y-label")]
        assert min(y_labels) > 0.8
        assert max(y_labels) < 1.0
        stems = [e for e in svg_elements(text, "line", "whisker") if "cap" not in e.get("class")]
        assert len(stems) == 2
        assert all(float(e.get("y2")) - float(e.get("y1")) > 50 for e in stems)

    def test_bars_rise_from_zero_when_range_straddles_it(self, report_config):
        """Test the baseline sits at 0 for mixed-sign metrics."""
        tensor = make_tensor(
            {("t1", "A"): [-0.5, -0.4, -0.3], ("t1", "B"): [0.3, 0.4, 0.5]}, [task("t1")], ["A", "B"], (0, 1, 2)
        )
        text = render_cells_svg(summary_table(build_report(tensor, report_config)))
        bars = svg_elements(text, "rect", "bar")
        below, above = sorted(bars, key=lambda e: float(e.get("y")))[::-1]
        assert float(below.get("y")) == pytest.approx(float(above.get("y")) + float(above.get("height")))


@pytest.fixture
def demo_report(demo_tensor, report_config):
    return build_report(demo_tensor, report_config)


@pytest.mark.unit
class TestPairwiseLayout:
    """Test the pairwise p-value matrix geometry and values."""

    def test_one_symmetric_entry_per_ordered_pair(self, demo_report):
        """Test each task panel holds k_t (k_t - 1) off-diagonal entries."""
        layout = compute_pairwise_layout(demo_report)
        rows = pairwise_table(demo_report)
        assert sum(len(p.cells) for p in layout.panels) == 2 * len(rows) == 136
        for panel in layout.panels:
            k = len(panel.models)
            assert len(panel.cells) == k * (k - 1)
            assert all(c.row != c.col for c in panel.cells)

    def test_panel_models_follow_registry_order(self, demo_report):
        """Test matrix rows are the task's present models in registry order."""
        panel = next(p for p in compute_pairwise_layout(demo_report).panels if p.task == "Cora")
        models = demo_report.tensor.models
        assert list(panel.models) == sorted(panel.models, key=models.index)

    @pytest.mark.parametrize("method", ["t", "wilcoxon", "both"])
    def test_values_match_pairwise_table(self, demo_report, method):
        """Test entries carry the selected method's adjusted p and verdict in both triangles."""
        layout = compute_pairwise_layout(demo_report, method)
        assert layout.method == method
        cells = {(p.task, c.model_a, c.model_b, c.row < c.col): c for p in layout.panels for c in p.cells}
        for row in pairwise_table(demo_report, method):
            expected = {"t": row.p_holm_t, "wilcoxon": row.p_holm_w, "both": max(row.p_holm_t, row.p_holm_w)}[method]
            for upper in (True, False):
                cell = cells[(row.task, row.model_a, row.model_b, upper)]
                assert cell.p_holm == pytest.approx(expected)
                assert cell.significant == row.significant

    def test_method_defaults_to_report_setting(self, demo_tensor):
        """Test the figure follows the report's pairwise_method."""
        report = build_report(demo_tensor, ReportConfig(pairwise_method="wilcoxon", bootstrap_B=100))
        assert compute_pairwise_layout(report).method == "wilcoxon"

    def test_grid_geometry(self, demo_report):
        """Test entry positions and non-overlapping panels."""
        style = PairwiseMatrixStyle(cell_size=30.0)
        layout = compute_pairwise_layout(demo_report, style=style)
        for panel in layout.panels:
            for cell in panel.cells:
                assert cell.x == pytest.approx(panel.grid_x + cell.col * 30.0)
                assert cell.y == pytest.approx(panel.grid_y + cell.row * 30.0)
        for left, right in zip(layout.panels, layout.panels[1:]):
            assert right.x >= left.grid_x + len(left.models) * 30.0
        last = layout.panels[-1]
        assert layout.width >= last.grid_x + len(last.models) * 30.0

    def test_unknown_method(self, demo_report):
        """Test an unsupported method is rejected."""
        with pytest.raises(InvalidArgumentError):
            compute_pairwise_layout(demo_report, "sign")


@pytest.mark.unit
class TestPairwiseSvg:
    """Test the pairwise p-value document."""

    def test_entries_and_diagonal(self, demo_report):
        """Test one rect per ordered pair and one diagonal rect per present model."""
        layout = compute_pairwise_layout(demo_report, "t")
        text = render_pairwise_svg(demo_report, "t")
        assert len(svg_elements(text, "rect", "pcell")) == 136
        assert len(svg_elements(text, "rect", "diag")) == sum(len(p.models) for p in layout.panels)
        significant = sum(c.significant for p in layout.panels for c in p.cells)
        marked = len(svg_elements(text, "rect", "sig")) + len(svg_elements(text, "rect", "strong"))
        assert marked == significant
        assert "Holm-adjusted p (t), alpha = 0.05" in text

    def test_printed_values(self, report_config):
        """Test each entry prints its adjusted p at the style precision."""
        tensor = make_tensor(
            {("t1", "A"): [0.1, 0.2, 0.3, 0.4], ("t1", "B"): [0.5, 0.7, 0.6, 0.9]}, [task("t1")], ["A", "B"], (0, 1, 2, 3)
        )
        report = build_report(tensor, report_config)
        (row,) = pairwise_table(report, "wilcoxon")
        labels = [e.text for e in svg_elements(render_pairwise_svg(report, "wilcoxon"), "text", "p-label")]
        assert labels == [f"{row.p_holm_w:.3f}"] * 2

    def test_byte_deterministic(self, demo_report):
        """Test identical input gives identical bytes."""
        assert render_pairwise_svg(demo_report) == render_pairwise_svg(demo_report)
