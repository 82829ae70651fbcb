import math

import pytest

from bench_sdk.config_models import ReportConfig
from bench_sdk.models import MetricDirection
from bench_sdk.ranking import build_rank_table, cd_analysis, find_cliques, friedman
from bench_sdk.report import CellMark, build_report, mark_cells, pairwise_table, summary_table
from bench_sdk.stats import cell_estimate, holm_adjust, paired_t, t_quantile, wilcoxon_signed_rank
from tests.helpers import make_tensor, task


@pytest.mark.edge
def test_two_seeds_use_one_degree_of_freedom():
    est = cell_estimate([0.4, 0.6], 0.05)
    assert est.mean == pytest.approx(0.5)
    assert est.halfwidth == pytest.approx(t_quantile(1, 0.975) * math.sqrt(0.02) / math.sqrt(2))


@pytest.mark.edge
def test_two_seed_wilcoxon_floor():
    result = wilcoxon_signed_rank([1.0, 2.0], [0.0, 0.0])
    assert result.n_effective == 2
    assert result.p_value == pytest.approx(0.5)


@pytest.mark.edge
def test_single_nonzero_difference():
    result = wilcoxon_signed_rank([1.0, 0.5, 0.5], [0.0, 0.5, 0.5])
    assert result.n_effective == 1
    assert result.p_value == 1.0


@pytest.mark.edge
def test_all_models_identical():
    rows = {("t1", m): [0.7, 0.7, 0.7] for m in ("A", "B", "C")}
    report = build_report(make_tensor(rows, [task("t1")], ["A", "B", "C"], (0, 1, 2)), ReportConfig())
    marks = mark_cells(report, "t1")
    assert marks.winner == "A"
    assert marks.tie_broken
    assert marks.models_marked(CellMark.TIE) == ["B", "C"]
    for row in pairwise_table(report, "both"):
        assert row.p_holm_t == 1.0
        assert row.p_holm_w == 1.0
        assert not row.significant


@pytest.mark.edge
def test_identical_rankings_everywhere_give_zero_friedman():
    specs = [task("t1"), task("t2"), task("t3")]
    rows = {(s.name, m): [0.5, 0.5] for s in specs for m in ("A", "B", "C")}
    result = friedman(build_rank_table(make_tensor(rows, specs, ["A", "B", "C"], (0, 1))))
    assert result.chi2 == pytest.approx(0.0, abs=1e-12)
    assert result.p_value == pytest.approx(1.0)


@pytest.mark.edge
def test_lower_is_better_ranks_in_cd():
    specs = [task(n, "graph_reg", direction=MetricDirection.LOWER_IS_BETTER) for n in ("q1", "q2")]
    rows = {}
    for spec in specs:
        rows[(spec.name, "A")] = [0.10, 0.12]
        rows[(spec.name, "B")] = [0.50, 0.52]
    cd = cd_analysis(make_tensor(rows, specs, ["A", "B"], (0, 1)), 0.05)
    assert list(cd.mean_ranks) == [1.0, 2.0]


@pytest.mark.edge
def test_more_than_twenty_models_has_no_cd():
    models = [f"M{i:02d}" for i in range(21)]
    specs = [task("t1"), task("t2")]
    rows = {(s.name, m): [0.01 * i, 0.01 * i + 0.005] for s in specs for i, m in enumerate(models)}
    report = build_report(make_tensor(rows, specs, models, (0, 1)), ReportConfig())
    assert report.cd is None
    assert len(report.task_pairwise("t1")) == 21 * 20 // 2


@pytest.mark.edge
def test_model_on_a_single_task():
    specs = [task("t1", "graph_cls"), task("t2", "node_cls")]
    rows = {
        ("t1", "A"): [0.5, 0.6],
        ("t2", "A"): [0.5, 0.6],
        ("t1", "B"): [0.6, 0.7],
        ("t2", "B"): [0.4, 0.5],
        ("t1", "C"): [0.9, 0.95],
    }
    report = build_report(make_tensor(rows, specs, ["A", "B", "C"], (0, 1)), ReportConfig())
    assert report.cd is not None
    assert report.cd.models == ("A", "B")
    assert mark_cells(report, "t1").winner == "C"
    assert mark_cells(report, "t2")["C"] is CellMark.INCOMPATIBLE
    assert len(report.task_pairwise("t1")) == 3


@pytest.mark.edge
def test_sparse_seed_labels():
    rows = {("t1", "A"): [0.1, 0.2, 0.3], ("t1", "B"): [0.3, 0.4, 0.5]}
    tensor = make_tensor(rows, [task("t1")], ["A", "B"], (3, 17, 42))
    report = build_report(tensor, ReportConfig())
    assert report.cell("t1", "B").mean == pytest.approx(0.4)
    assert report.provenance.tensor_hash
    assert paired_t(tensor.pair_values("t1", "A"), tensor.pair_values("t1", "B")).p_value < 0.05


@pytest.mark.edge
def test_negative_metric_values():
    rows = {("t1", "A"): [-1.2, -1.0, -1.1], ("t1", "B"): [-0.2, -0.1, -0.3]}
    report = build_report(make_tensor(rows, [task("t1")], ["A", "B"], (0, 1, 2)), ReportConfig())
    texts = {r.model: r.text for r in summary_table(report)}
    assert texts["A"].startswith("-1.100±")
    assert mark_cells(report, "t1").winner == "B"


@pytest.mark.edge
def test_holm_single_and_saturated_families():
    assert holm_adjust([0.03]) == [0.03]
    assert holm_adjust([1.0, 1.0]) == [1.0, 1.0]
    assert holm_adjust([0.0, 0.5]) == pytest.approx([0.0, 0.5])


@pytest.mark.edge
def test_single_model_clique_is_never_reported():
    assert find_cliques([1.0], 5.0) == []


@pytest.mark.edge
def test_negative_cd_gives_no_cliques():
    assert find_cliques([1.0, 2.0], -0.5) == []
