import math

import pytest
from hypothesis import given, strategies as st

from ucme.archive import ArchiveConfig, Elite, EliteArchive, cell_of
from ucme.domain import Evaluation
from ucme.metrics import (
    RunLog,
    Snapshot,
    auc,
    local_metrics,
    t_test,
    usc_efficiency,
    usc_metrics,
)

CFG = ArchiveConfig()


def elite(fitness, bc):
    ev = Evaluation(True, 1.0, (1.0,) * 7, fitness, bc)
    return Elite(None, ev, cell_of(bc, CFG))


class TestUscMetrics:
    def test_empty_archive(self):
        assert usc_metrics(EliteArchive(CFG), "U1", 1) == (0, 0, 0, 0)

    def test_single_elite(self):
        archive = EliteArchive(CFG)
        archive.try_insert(elite(0.9, (0.8, 0.3)))
        mx, mean, mean_w, sum_w = usc_metrics(archive, "U1", 1)
        assert mx == pytest.approx(0.8)
        assert mean == pytest.approx(0.8)
        assert mean_w == pytest.approx(0.72)
        assert sum_w == pytest.approx(0.72)

    def test_two_elites(self):
        archive = EliteArchive(CFG)
        archive.try_insert(elite(1.0, (0.4, 0.3)))
        archive.try_insert(elite(1.0, (0.8, 0.7)))
        mx, mean, mean_w, sum_w = usc_metrics(archive, "U1", 1)
        assert mean == pytest.approx(0.6)
        assert sum_w == pytest.approx(1.2)
        assert mx == pytest.approx(0.8)

    def test_sum_wusc_bounded_by_qd(self):
        archive = EliteArchive(CFG)
        for i in range(20):
            archive.try_insert(elite(0.6 + 0.02 * i, (i / 20, 0.5)))
        _, _, _, sum_w = usc_metrics(archive, "U4", 3)
        assert sum_w <= archive.qd_score() + 1e-12


class TestLocalMetrics:
    def test_single_alternative(self):
        div, fit, mean_usc = local_metrics([elite(0.7, (0.2, 0.2))], "U1", 1)
        assert div == 0.0
        assert fit == pytest.approx(0.7)
        assert mean_usc == pytest.approx(0.2)

    def test_diagonal_pair(self):
        div, _, _ = local_metrics(
            [elite(0.7, (0.0, 0.0)), elite(0.7, (1.0, 1.0))], "U1", 1)
        assert div == pytest.approx(math.sqrt(2))

    def test_identical_bcs(self):
        alts = [elite(0.7, (0.4, 0.4))] * 4
        div, _, _ = local_metrics(alts, "U1", 1)
        assert div == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            local_metrics([], "U1", 1)


class TestEfficiency:
    def test_monotone_ascent(self):
        assert usc_efficiency([0.1, 0.2, 0.3]) == pytest.approx(1.0)

    def test_perfect_cancellation(self):
        assert usc_efficiency([0.3, 0.2, 0.3]) == pytest.approx(0.0)

    def test_partial_progress(self):
        assert usc_efficiency([0.2, 0.5, 0.4]) == pytest.approx(0.5)

    def test_all_flat_defined_as_zero(self):
        assert usc_efficiency([0.4, 0.4, 0.4]) == 0.0

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            usc_efficiency([0.5])

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
    def test_bounded(self, vals):
        assert -1.0 <= usc_efficiency(vals) <= 1.0

    @given(st.lists(st.integers(0, 1024).map(lambda i: i / 1024.0),
                    min_size=2, max_size=30))
    def test_one_iff_nondecreasing_with_rise(self, vals):
        # dyadic values keep float sums exact, so the iff holds exactly
        e = usc_efficiency(vals)
        nondecreasing = all(b >= a for a, b in zip(vals, vals[1:]))
        has_rise = any(b > a for a, b in zip(vals, vals[1:]))
        assert (e == 1.0) == (nondecreasing and has_rise)


class TestAuc:
    def test_constant_series(self):
        assert auc([(0, 0.5), (100, 0.5), (250, 0.5)]) == pytest.approx(0.5)

    def test_linear_ramp(self):
        assert auc([(0, 0.0), (1000, 1.0)]) == pytest.approx(0.5)

    def test_single_point_rejected(self):
        with pytest.raises(ValueError):
            auc([(0, 1.0)])

    def test_non_increasing_evals_rejected(self):
        with pytest.raises(ValueError):
            auc([(0, 1.0), (0, 2.0)])

    @given(st.lists(st.tuples(st.integers(0, 10**6), st.floats(0, 1)),
                    min_size=2, max_size=40, unique_by=lambda p: p[0]))
    def test_bounded_by_extremes(self, series):
        series = sorted(series)
        value = auc(series)
        values = [v for _, v in series]
        assert min(values) - 1e-9 <= value <= max(values) + 1e-9


class TestTTest:
    def test_identical_samples(self):
        t, p = t_test([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert t == pytest.approx(0.0)
        assert p == pytest.approx(1.0)

    def test_degenerate_separation(self):
        t, p = t_test([0.0] * 5, [1.0] * 5)
        assert p == pytest.approx(0.0)
        assert t == -math.inf

    def test_swap_negates_t(self):
        a = [0.1, 0.4, 0.35, 0.2]
        b = [0.5, 0.6, 0.55, 0.7]
        t1, p1 = t_test(a, b)
        t2, p2 = t_test(b, a)
        assert t1 == pytest.approx(-t2)
        assert p1 == pytest.approx(p2)

    def test_against_scipy(self):
        from scipy.stats import ttest_ind
        a = [0.3, 0.5, 0.4, 0.45, 0.38]
        b = [0.42, 0.52, 0.6, 0.48, 0.55]
        t, p = t_test(a, b)
        ref = ttest_ind(a, b, equal_var=True)
        assert t == pytest.approx(ref.statistic, abs=1e-12)
        assert p == pytest.approx(ref.pvalue, abs=1e-12)

    def test_zero_variance_equal_means(self):
        t, p = t_test([2.0, 2.0], [2.0, 2.0])
        assert p == 1.0

    def test_small_samples_rejected(self):
        with pytest.raises(ValueError):
            t_test([1.0], [1.0, 2.0])


class TestRunLog:
    def test_jsonl_roundtrip(self):
        log = RunLog(config={"user": "U1", "das": "corners"}, seed=3,
                     run_index=1)
        log.snapshots.append(Snapshot(0, 0, 0.1, 0.8, 12.0, 0.5, 0.4,
                                      0.3, 9.0, 0.0, 0.0, 0.0))
        log.selections.append({"s": 1, "method": "corners", "cell": [3, 4],
                               "bc": [0.5, 0.5], "fitness": 0.9, "usc": 0.5})
        log.final_feasible = [{"cell": [3, 4], "quality": 0.9,
                               "fitness": 0.9, "feasibility": 1.0,
                               "bc": [0.5, 0.5]}]
        text = log.to_jsonl()
        again = RunLog.from_jsonl(text)
        assert again.to_jsonl() == text
        assert again.config == log.config
        assert again.snapshots == log.snapshots
