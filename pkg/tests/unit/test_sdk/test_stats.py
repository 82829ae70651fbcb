"""
Unit tests for per-cell estimation, paired tests and Holm adjustment.

scipy.stats reference implementations serve as oracles where they compute the same quantity.
"""

import itertools
import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from bench_sdk.config_models import BootstrapSpec, ReportConfig
from bench_sdk.protocol import InsufficientModelsError, InsufficientSamplesError, InvalidArgumentError
from bench_sdk.stats import (
    bootstrap_halfwidth,
    cell_estimate,
    chi2_sf,
    holm_adjust,
    paired_t,
    pairwise_task,
    t_quantile,
    wilcoxon_signed_rank,
)
from tests.helpers import make_tensor, task


@pytest.mark.unit
class TestDistributions:
    """Test the t and chi-square helpers."""

    def test_t_quantile_nine_df(self):
        """Test the two-sided 95% quantile for ten seeds."""
        assert t_quantile(9, 0.975) == pytest.approx(2.2621571627982, abs=1e-9)

    def test_t_quantile_rejects_bad_df(self):
        """Test df < 1."""
        with pytest.raises(InvalidArgumentError):
            t_quantile(0, 0.975)

    def test_chi2_sf_matches_scipy(self):
        """Test the chi-square survival function."""
        assert chi2_sf(2.04, 3) == pytest.approx(scipy_stats.chi2.sf(2.04, 3), rel=1e-12)

    def test_chi2_sf_negative_is_one(self):
        """Test that negative statistics clamp to p = 1."""
        assert chi2_sf(-1e-15, 3) == 1.0


@pytest.mark.unit
class TestCellEstimate:
    """Test the Student-t cell interval."""

    def test_known_values(self):
        """Test mean, variance and half-width of 1..5."""
        est = cell_estimate([1, 2, 3, 4, 5], 0.05)
        assert est.mean == 3.0
        assert est.variance == pytest.approx(2.5)
        expected = scipy_stats.t.ppf(0.975, 4) * math.sqrt(2.5) / math.sqrt(5)
        assert est.halfwidth == pytest.approx(expected, rel=1e-12)

    def test_constant_samples_have_zero_width(self):
        """Test zero spread."""
        assert cell_estimate([0.7] * 10, 0.05).halfwidth == 0.0

    def test_single_seed_is_rejected(self):
        """Test that one sample cannot give an interval."""
        with pytest.raises(InsufficientSamplesError):
            cell_estimate([0.5], 0.05)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1])
    def test_alpha_out_of_range(self, alpha):
        """Test alpha outside (0, 1)."""
        with pytest.raises(InvalidArgumentError):
            cell_estimate([1, 2], alpha)


@pytest.mark.unit
class TestBootstrap:
    """Test the percentile-bootstrap half-width."""

    def test_deterministic_for_seed(self):
        """Test equal inputs give equal widths."""
        spec = BootstrapSpec(B=2000, seed=7)
        samples = [0.1, 0.4, 0.35, 0.8, 0.62, 0.5]
        assert bootstrap_halfwidth(samples, 0.05, spec) == bootstrap_halfwidth(samples, 0.05, spec)

    def test_order_invariant(self):
        """Test that only the multiset of values matters."""
        spec = BootstrapSpec(B=2000, seed=3)
        a = bootstrap_halfwidth([0.1, 0.4, 0.35, 0.8, 0.62], 0.05, spec)
        b = bootstrap_halfwidth([0.8, 0.62, 0.1, 0.35, 0.4], 0.05, spec)
        assert a == b

    def test_constant_samples(self):
        """Test zero width for a constant sample."""
        assert bootstrap_halfwidth([0.5] * 8, 0.05, BootstrapSpec(B=500)) == 0.0

    def test_width_is_plausible(self):
        """Test the bootstrap width is close to the t width on a normal sample."""
        rng = np.random.default_rng(0)
        samples = rng.normal(0.0, 1.0, size=200)
        boot = bootstrap_halfwidth(samples, 0.05, BootstrapSpec(B=4000, seed=1))
        t_width = cell_estimate(samples, 0.05).halfwidth
        assert boot == pytest.approx(t_width, rel=0.15)


@pytest.mark.unit
class TestPairedT:
    """Test the seed-paired t-test."""

    def test_matches_scipy(self):
        """Test statistic and p against scipy.stats.ttest_rel."""
        x = [0.81, 0.79, 0.84, 0.80, 0.83, 0.82]
        y = [0.78, 0.79, 0.80, 0.77, 0.81, 0.79]
        result = paired_t(x, y)
        reference = scipy_stats.ttest_rel(x, y)
        assert result.t_stat == pytest.approx(reference.statistic, rel=1e-10)
        assert result.p_value == pytest.approx(reference.pvalue, rel=1e-10)
        assert not result.degenerate

    def test_cohens_dz(self):
        """Test d_z = mean(d) / sd(d)."""
        x, y = [1.0, 2.0, 3.0, 4.0], [0.0, 0.0, 0.0, 0.0]
        d = np.array(x) - np.array(y)
        assert paired_t(x, y).dz == pytest.approx(d.mean() / d.std(ddof=1))

    def test_identical_samples(self):
        """Test zero differences: T = 0, p = 1."""
        result = paired_t([0.5, 0.6, 0.7], [0.5, 0.6, 0.7])
        assert result.t_stat == 0.0
        assert result.p_value == 1.0
        assert result.degenerate

    def test_constant_nonzero_shift(self):
        """Test constant non-zero differences: undefined T, p = 0."""
        result = paired_t([0.6, 0.7, 0.8], [0.5, 0.6, 0.7])
        assert result.t_stat is None
        assert result.dz is None
        assert result.p_value == 0.0

    def test_length_mismatch(self):
        """Test that unpaired lengths are rejected."""
        with pytest.raises(InvalidArgumentError):
            paired_t([1, 2, 3], [1, 2])

    def test_needs_two_pairs(self):
        """Test a single pair."""
        with pytest.raises(InsufficientSamplesError):
            paired_t([1.0], [0.0])


@pytest.mark.unit
class TestWilcoxon:
    """Test the signed-rank test."""

    def test_all_positive_ten_seeds(self):
        """Test the exact minimum two-sided p for S = 10."""
        x = [1.0 + i for i in range(10)]
        y = [0.0] * 10
        result = wilcoxon_signed_rank(x, y)
        assert result.w_stat == 55.0
        assert result.n_effective == 10
        assert result.p_value == pytest.approx(0.001953125, abs=1e-15)

    def test_exact_matches_scipy(self):
        """Test the exact p against scipy on distinct differences."""
        d = [0.5, -1.1, 2.3, 1.7, -0.2, 3.1, 0.9, 2.6]
        result = wilcoxon_signed_rank(d, [0.0] * len(d))
        reference = scipy_stats.wilcoxon(d, method="exact")
        assert result.p_value == pytest.approx(reference.pvalue, rel=1e-12)

    def test_zero_differences_are_dropped(self):
        """Test that ties at zero reduce the effective sample."""
        result = wilcoxon_signed_rank([1.0, 2.0, 3.0, 4.0], [1.0, 1.0, 1.0, 1.0])
        assert result.n_effective == 3

    def test_all_zero_differences(self):
        """Test p = 1 when every difference is zero."""
        result = wilcoxon_signed_rank([0.3, 0.4], [0.3, 0.4])
        assert result.p_value == 1.0
        assert result.n_effective == 0

    def test_tied_ranks_use_average(self):
        """Test that tied |d| are handled by the exact distribution."""
        d = [1.0, 1.0, -1.0, 2.0, 2.0, 3.0]
        result = wilcoxon_signed_rank(d, [0.0] * len(d))
        assert 0.0 < result.p_value <= 1.0
        # ranks: 1,1,1 -> 2; 2,2 -> 4.5; 3 -> 6; positive sum 19, W = 2*19 - 21
        assert result.w_stat == pytest.approx(17.0)

    def test_normal_approximation_above_twenty(self):
        """Test the large-sample branch against scipy's corrected approximation."""
        rng = np.random.default_rng(11)
        d = rng.normal(0.3, 1.0, size=30)
        result = wilcoxon_signed_rank(d, np.zeros(30))
        reference = scipy_stats.wilcoxon(d, method="approx", correction=True)
        assert result.n_effective == 30
        assert result.p_value == pytest.approx(reference.pvalue, rel=1e-6)


@pytest.mark.unit
class TestHolm:
    """Test the Holm step-down adjustment."""

    def test_known_family(self):
        """Test a four-test family aligned with input order."""
        assert holm_adjust([0.01, 0.04, 0.03, 0.005]) == pytest.approx([0.03, 0.06, 0.06, 0.02])

    def test_equal_p_values_share_adjustment(self):
        """Test ties receive equal adjusted values."""
        assert holm_adjust([0.01, 0.01, 0.04]) == pytest.approx([0.03, 0.03, 0.04])

    def test_six_pair_family_at_ten_seeds(self):
        """Test six equal exact Wilcoxon minima."""
        assert holm_adjust([0.001953125] * 6) == pytest.approx([0.01171875] * 6)

    def test_six_pair_family_at_five_seeds(self):
        """Test S = 5: the smallest attainable adjusted p is 0.375."""
        assert holm_adjust([0.0625] * 6) == pytest.approx([0.375] * 6)

    def test_capped_at_one(self):
        """Test adjusted values never exceed 1."""
        assert max(holm_adjust([0.6, 0.7, 0.9])) == 1.0

    def test_monotone_in_raw_order(self):
        """Test adjusted p is non-decreasing along sorted raw p."""
        raw = [0.2, 0.001, 0.05, 0.04, 0.3]
        adjusted = holm_adjust(raw)
        pairs = sorted(zip(raw, adjusted))
        assert all(a[1] <= b[1] for a, b in zip(pairs, pairs[1:]))
        assert all(adj >= p for p, adj in zip(raw, adjusted))

    def test_empty_family(self):
        """Test an empty family."""
        assert holm_adjust([]) == []

    def test_rejects_invalid_p(self):
        """Test p outside [0, 1]."""
        with pytest.raises(InvalidArgumentError):
            holm_adjust([0.5, 1.5])


@pytest.mark.unit
class TestPairwiseTask:
    """Test the per-task pairwise family."""

    def test_pair_order_and_count(self, tsp_tensor, report_config):
        """Test C(4, 2) pairs in registry order."""
        results = pairwise_task(tsp_tensor, "TSP-random", report_config)
        assert [(r.model_a, r.model_b) for r in results] == [
            ("GCN", "GAT"),
            ("GCN", "SAGE"),
            ("GCN", "GT"),
            ("GAT", "SAGE"),
            ("GAT", "GT"),
            ("SAGE", "GT"),
        ]

    def test_delta_and_holm(self, tsp_tensor, report_config):
        """Test raw mean differences and the per-task Holm family."""
        results = pairwise_task(tsp_tensor, "TSP-random", report_config)
        assert results[0].delta_mu == pytest.approx(0.864 - 0.832)
        assert [r.p_t_holm for r in results] == pytest.approx(holm_adjust([r.p_t_raw for r in results]))
        assert [r.p_w_holm for r in results] == pytest.approx(holm_adjust([r.p_w_raw for r in results]))

    def test_incompatible_models_are_excluded(self, report_config):
        """Test that absent pairs do not enter the family."""
        spec = task("t1")
        tensor = make_tensor(
            {("t1", "A"): [1, 2, 3], ("t1", "C"): [2, 3, 5]}, [spec], ["A", "B", "C"], (0, 1, 2)
        )
        results = pairwise_task(tensor, "t1", report_config)
        assert [(r.model_a, r.model_b) for r in results] == [("A", "C")]

    def test_single_model_task(self, report_config):
        """Test fewer than two models."""
        spec = task("t1")
        tensor = make_tensor({("t1", "A"): [1, 2]}, [spec], ["A", "B"], (0, 1))
        with pytest.raises(InsufficientModelsError):
            pairwise_task(tensor, "t1", ReportConfig())


def brute_force_wilcoxon_p(d):
    """Two-sided exact p by listing every sign assignment of the averaged |d| ranks."""
    d = [v for v in d if v != 0]
    ranks = scipy_stats.rankdata(np.abs(d))
    observed = sum(r if v > 0 else -r for r, v in zip(ranks, d))
    extreme = 0
    total = 0
    for signs in itertools.product((1, -1), repeat=len(d)):
        w = sum(s * r for s, r in zip(signs, ranks))
        total += 1
        if abs(w) >= abs(observed) - 1e-9:
            extreme += 1
    return extreme / total


def brute_force_holm(p):
    """adjusted_i = min(1, max over j with p_j <= p_i of (m - rank_j + 1) * p_j)."""
    m = len(p)
    order = sorted(range(m), key=lambda i: p[i])
    rank = {i: r for r, i in enumerate(order)}
    return [
        min(1.0, max((m - rank[j]) * p[j] for j in range(m) if p[j] <= p[i]))
        for i in range(m)
    ]


@pytest.mark.unit
class TestBruteForceOracles:
    """Test kernels against direct enumeration."""

    @pytest.mark.parametrize(
        "d",
        [
            [0.3, -0.1, 0.25, 0.4, -0.05, 0.6, 0.2],
            [1.0, 1.0, -1.0, 2.0, 2.0, 3.0, -3.0, 0.0],
            [0.5, -0.5, 0.5, 1.5, -2.0, 2.0, 0.0, 0.7, 0.9, -0.1],
        ],
    )
    def test_wilcoxon_enumeration(self, d):
        """Test the exact p equals the sign-assignment enumeration."""
        result = wilcoxon_signed_rank(d, [0.0] * len(d))
        assert result.p_value == pytest.approx(brute_force_wilcoxon_p(d), abs=1e-12)

    @pytest.mark.parametrize(
        "p",
        [
            [0.01, 0.04, 0.03, 0.005],
            [0.2, 0.001, 0.05, 0.04, 0.3, 0.05],
            [0.9, 0.02, 0.02, 0.5],
        ],
    )
    def test_holm_max_min(self, p):
        """Test Holm against the direct step-down formula."""
        assert holm_adjust(p) == pytest.approx(brute_force_holm(p))

    def test_wilcoxon_random_vectors(self):
        """Test 500 random distinct-|d| vectors with n <= 10 against enumeration."""
        rng = np.random.default_rng(20240501)
        for _ in range(500):
            n = int(rng.integers(1, 11))
            d = rng.normal(0.0, 1.0, size=n).tolist()
            result = wilcoxon_signed_rank(d, [0.0] * n)
            assert result.p_value == pytest.approx(brute_force_wilcoxon_p(d), abs=1e-12), d

    def test_holm_random_families(self):
        """Test 1000 random families of up to six p-values, half of them with ties."""
        rng = np.random.default_rng(77)
        for i in range(1000):
            m = int(rng.integers(1, 7))
            p = rng.uniform(0.0, 0.2, size=m)
            if i % 2:
                p = np.round(p, 2)
            p = p.tolist()
            assert holm_adjust(p) == pytest.approx(brute_force_holm(p), abs=1e-15), p

    @pytest.mark.parametrize("df", [*range(1, 31), 100])
    def test_t_quantile_grid(self, df):
        """Test the t inverse CDF against scipy over the tabulated levels."""
        for p in (0.9, 0.95, 0.975, 0.995):
            assert abs(t_quantile(df, p) - scipy_stats.t.ppf(p, df)) < 1e-8


@pytest.mark.unit
class TestStatisticProperties:
    """Randomized checks of identities the kernels must satisfy."""

    def test_paired_t_antisymmetry(self):
        """Test swapping the samples negates T and d_z and keeps p."""
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(2, 16))
            x = rng.normal(0.8, 0.05, size=n)
            y = rng.normal(0.8, 0.05, size=n)
            forward, backward = paired_t(x, y), paired_t(y, x)
            assert backward.t_stat == pytest.approx(-forward.t_stat, rel=1e-12)
            assert backward.dz == pytest.approx(-forward.dz, rel=1e-12)
            assert backward.p_value == forward.p_value

    def test_wilcoxon_swap_keeps_p(self):
        """Test swapping the samples negates W and keeps p."""
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(1, 25))
            x, y = rng.normal(size=n), rng.normal(size=n)
            forward, backward = wilcoxon_signed_rank(x, y), wilcoxon_signed_rank(y, x)
            assert backward.w_stat == -forward.w_stat
            assert backward.p_value == pytest.approx(forward.p_value, rel=1e-12)

    @pytest.mark.parametrize("n_seeds", range(2, 13))
    def test_wilcoxon_floor(self, n_seeds):
        """Test the smallest exact two-sided p is 2 * 2^-S with no zero differences."""
        d = [0.01 * (i + 1) for i in range(n_seeds)]
        assert wilcoxon_signed_rank(d, [0.0] * n_seeds).p_value == 2.0 * 2.0**-n_seeds

    def test_five_seed_floor_after_holm(self):
        """Test S = 5 same-sign differences: raw p 0.0625, six-pair Holm 0.375."""
        raw = wilcoxon_signed_rank([0.9, 0.8, 0.85, 0.95, 0.7], [0.1] * 5).p_value
        assert raw == 0.0625
        assert holm_adjust([raw] * 6) == [0.375] * 6

    def test_variance_matches_two_pass(self):
        """Test the unbiased variance against an explicit two-pass sum."""
        rng = np.random.default_rng(8)
        for _ in range(200):
            n = int(rng.integers(2, 30))
            x = rng.normal(0.7, 0.1, size=n).tolist()
            mean = sum(x) / n
            two_pass = sum((v - mean) ** 2 for v in x) / (n - 1)
            assert cell_estimate(x, 0.05).variance == pytest.approx(two_pass, rel=1e-12, abs=1e-12)

    def test_wilcoxon_invariant_under_odd_monotone_maps(self):
        """Test W and p depend only on signs and |d| ranks, so odd increasing maps keep them."""
        rng = np.random.default_rng(9)
        for _ in range(200):
            n = int(rng.integers(1, 25))
            d = np.round(rng.normal(0.0, 1.0, size=n), 1)
            reference = wilcoxon_signed_rank(d, np.zeros(n))
            for g in (np.sinh, np.arctan, lambda v: v**3 + 2.0 * v):
                result = wilcoxon_signed_rank(g(d), np.zeros(n))
                assert result.w_stat == reference.w_stat
                assert result.p_value == pytest.approx(reference.p_value, rel=1e-12)
                assert result.n_effective == reference.n_effective
