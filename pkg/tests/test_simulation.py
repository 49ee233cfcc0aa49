import math

import numpy as np
import pytest

import sarascan as ss
from sarascan.simulation import _max_contrast_rows, _nearest_matching, _noise_matrix


class TestTruthSpec:
    def test_validation(self):
        with pytest.raises(ss.InvalidSpec):
            ss.TruthSpec(n=10, changepoints=(5,), jump_sizes=())
        with pytest.raises(ss.InvalidSpec):
            ss.TruthSpec(n=10, changepoints=(10,), jump_sizes=(1.0,))
        with pytest.raises(ss.InvalidSpec):
            ss.TruthSpec(n=10, changepoints=(5, 5), jump_sizes=(1.0, 1.0))

    def test_mean_vector_steps(self):
        spec = ss.TruthSpec(n=6, changepoints=(2, 4), jump_sizes=(1.0, -0.5), baseline=0.25)
        np.testing.assert_allclose(
            spec.mean_vector(), [0.25, 0.25, 1.25, 1.25, 0.75, 0.75]
        )

    def test_trend_term(self):
        spec = ss.TruthSpec(
            n=4, sigma=0.2, trend_amp=0.25, trend_freq=0.01, seed=1
        )
        i = np.arange(1, 5)
        np.testing.assert_allclose(
            spec.mean_vector(), 0.25 * 0.2 * np.sin(0.01 * np.pi * i)
        )


class TestGenerate:
    def test_noiseless_is_exact(self):
        spec = ss.TruthSpec(n=10, changepoints=(5,), jump_sizes=(1.0,), sigma=0.0)
        np.testing.assert_array_equal(
            ss.generate(spec).values, [0.0] * 5 + [1.0] * 5
        )

    def test_same_seed_same_series(self):
        spec = ss.TruthSpec(n=50, changepoints=(20,), jump_sizes=(1.0,), sigma=0.5, seed=99)
        np.testing.assert_array_equal(ss.generate(spec).values, ss.generate(spec).values)

    def test_different_seeds_differ(self):
        a = ss.TruthSpec(n=50, sigma=1.0, seed=1)
        b = ss.TruthSpec(n=50, sigma=1.0, seed=2)
        assert not np.array_equal(ss.generate(a).values, ss.generate(b).values)

    def test_benchmark_spec_frozen(self):
        spec = ss.six_changepoint_benchmark(sigma=0.2, trend="short")
        assert spec.n == 497
        assert spec.changepoints == (137, 224, 241, 298, 307, 331)
        assert spec.jump_sizes == (0.26, 0.99, -1.6, 0.69, -0.85, 0.53)
        assert spec.baseline == -0.18
        assert spec.trend_freq == 0.025
        assert ss.six_changepoint_benchmark(trend="long").trend_freq == 0.01
        assert ss.six_changepoint_benchmark(trend="none").trend_freq == 0.0

    def test_child_seeds_deterministic(self):
        a = ss.child_seeds(7, 5)
        b = ss.child_seeds(7, 5)
        np.testing.assert_array_equal(a, b)
        assert len(set(a.tolist())) == 5


class TestLrStatistic:
    def test_constant_is_zero(self):
        assert ss.lr_statistic(ss.Series(np.full(20, 1.5))) == pytest.approx(0.0)

    def test_matches_enumeration(self):
        y = [0.0, 0.0, 1.0, 1.0]
        s = np.cumsum(y)
        want = max(
            (j * s[-1] / 4 - s[j - 1]) ** 2 / (j * (1 - j / 4)) for j in (1, 2, 3)
        )
        assert ss.lr_statistic(ss.Series(y)) == pytest.approx(want)
        assert want == pytest.approx(1.0)

    def test_matches_enumeration_random(self):
        rng = np.random.default_rng(80)
        for _ in range(20):
            n = int(rng.integers(2, 60))
            y = rng.standard_normal(n)
            s = np.cumsum(y)
            want = max(
                (j * s[-1] / n - s[j - 1]) ** 2 / (j * (1 - j / n))
                for j in range(1, n)
            )
            assert ss.lr_statistic(ss.Series(y)) == pytest.approx(want)

    def test_null_percentile_reproducible(self):
        # 95th percentile of the null statistic stays within 2% across seeds
        quantiles = []
        for seed in (1, 2, 3):
            rows = _noise_matrix(100, ss.child_seeds(seed, 10_000))
            from sarascan.simulation import _lr_rows

            quantiles.append(float(np.quantile(_lr_rows(rows), 0.95)))
        spread = (max(quantiles) - min(quantiles)) / np.mean(quantiles)
        assert spread <= 0.04  # +-2% around the mean


class TestTheoremBound:
    def test_strong_signal_saturates(self):
        # 1 - (8/80) exp(log 400 - 200) is within one ulp of 1
        assert ss.theorem1_bound(1.0, 400, 0.25, 400) == pytest.approx(1.0, abs=1e-15)

    def test_moderate_signal_formula(self):
        s2 = 1.0 * 30 / 0.25**2
        want = 1.0 - 8.0 / math.sqrt(s2) * math.exp(math.log(400) - s2 / 32.0)
        assert ss.theorem1_bound(1.0, 30, 0.25, 400) == pytest.approx(want)

    def test_boundary_equality_uses_formula(self):
        # at S^2 = 32 log n the exponential is 1 and the bound is 1 - 8/S;
        # nudge just above equality to dodge one-ulp rounding in S^2
        n = 400
        L = 100
        delta = math.sqrt(32.0 * math.log(n) / L) * (1.0 + 1e-12)
        want = 1.0 - 8.0 / math.sqrt(32.0 * math.log(n))
        assert ss.theorem1_bound(delta, L, 1.0, n) == pytest.approx(want, rel=1e-6)

    def test_below_requirement_is_zero(self):
        assert ss.theorem1_bound(0.1, 10, 1.0, 400) == 0.0

    def test_monotonicity(self):
        base = ss.theorem1_bound(1.0, 60, 0.25, 400)
        assert ss.theorem1_bound(1.2, 60, 0.25, 400) >= base
        assert ss.theorem1_bound(1.0, 80, 0.25, 400) >= base
        assert ss.theorem1_bound(1.0, 60, 0.30, 400) <= base
        assert ss.theorem1_bound(1.0, 60, 0.25, 800) <= base


class TestDetectionMetrics:
    def truth(self):
        return ss.TruthSpec(
            n=100, changepoints=(20, 50, 80), jump_sizes=(1.0, 1.0, 1.0), sigma=0.1
        )

    def model(self, cps):
        return ss.SegmentationModel(tuple(cps), (0.0,) * (len(cps) + 1), 0.0)

    def test_exact_estimate(self):
        outcome = ss.detection_metrics(self.truth(), self.model([20, 50, 80]))
        assert outcome.detected == (True, True, True)
        assert outcome.false_discoveries == 0

    def test_boundary_of_tolerance(self):
        outcome = ss.detection_metrics(self.truth(), self.model([20, 50, 86]))
        assert outcome.detected == (True, True, False)
        assert outcome.false_discoveries == 1
        at_five = ss.detection_metrics(self.truth(), self.model([20, 50, 85]))
        assert at_five.detected == (True, True, True)
        assert at_five.false_discoveries == 0

    def test_one_estimate_serves_one_truth(self):
        truth = ss.TruthSpec(n=100, changepoints=(48, 52), jump_sizes=(1.0, 1.0), sigma=0.1)
        outcome = ss.detection_metrics(truth, self.model([50]))
        assert outcome.detected.count(True) == 1
        assert outcome.false_discoveries == 0  # a truth lies within tol

    def test_extra_estimates(self):
        outcome = ss.detection_metrics(self.truth(), self.model([20, 21, 50, 80, 95]))
        assert outcome.detected == (True, True, True)
        assert outcome.false_discoveries == 1  # only 95 is far from every truth

    def test_greedy_matching_helper(self):
        assert _nearest_matching((10, 20), (19,)) == [None, 1.0]
        assert _nearest_matching((10, 20), ()) == [None, None]


class TestStudyReport:
    def test_histogram_must_sum(self):
        with pytest.raises(ValueError):
            ss.StudyReport(replicate_count=10, jhat_histogram={2: 3})

    def test_fraction_helpers(self):
        report = ss.StudyReport(replicate_count=10, jhat_histogram={1: 2, 2: 7, 3: 1})
        assert report.jhat_fraction(2) == pytest.approx(0.7)
        assert report.jhat_fraction_below(2) == pytest.approx(0.2)


class TestPowerStudy:
    def test_contrast_rows_match_profile_op(self):
        rng = np.random.default_rng(81)
        matrix = rng.standard_normal((5, 60))
        rows = _max_contrast_rows(matrix, 7)
        for i in range(5):
            profile = ss.equal_weight_diagnostic(ss.Series(matrix[i]), 7)
            assert rows[i] == pytest.approx(np.abs(profile.values).max(), abs=1e-9)

    def test_null_size_and_location_draw(self):
        report = ss.power_study(
            n=100,
            jsr_grid=(0.0,),
            locations=(50, "uniform"),
            alpha=0.05,
            bandwidths=(10, 15),
            reps=3000,
            seed=2,
        )
        for key, value in report.power.items():
            assert value == pytest.approx(0.05, abs=0.02)

    def test_report_is_deterministic(self):
        kwargs = dict(
            n=100, jsr_grid=(1.0,), locations=(30,), alpha=0.05,
            bandwidths=(10,), reps=500, seed=9,
        )
        assert ss.power_study(**kwargs) == ss.power_study(**kwargs)

    def test_rejects_bad_config(self):
        with pytest.raises(ss.InvalidSpec):
            ss.power_study(n=100, alpha=1.5, reps=10)
        with pytest.raises(ss.InvalidSpec):
            ss.power_study(n=100, bandwidths=(60,), reps=10)


class TestSureCoverage:
    def test_tiny_noise_recovers_everything(self):
        reports = ss.sure_coverage_study(
            pairs=[(400, 12)], delta=1.0, sigmas=[0.01], reps=50, seed=12
        )
        report = reports[(400, 12, 0.01)]
        assert report.jhat_fraction(2) == 1.0
        assert report.joint_coverage == 1.0
        for cov in report.scp_per_cp:
            assert cov.coverage == 1.0
            assert cov.mean_abs_error == 0.0

    def test_rule_half_parameters(self):
        reports = ss.sure_coverage_study(
            pairs=[(400, 16)], delta=1.0, sigmas=[0.25], reps=100, seed=13, rule="half"
        )
        report = reports[(400, 16, 0.25)]
        assert report.joint_coverage >= ss.theorem1_bound(1.0, 16, 0.25, 400)


class TestModelSizeStudy:
    def test_short_trend_row(self):
        # sinusoidal drift makes the faint first jump harder; the multi-
        # bandwidth detector still sizes the model correctly (measured at
        # this seed: cp1 0.81, afd 0.20, j6 0.99)
        reports = ss.model_size_study(
            {"msara": ss.msara_detector()}, sigma=0.2, trend="short",
            reps=600, seed=20,
        )
        report = reports["msara"]
        assert report.jhat_fraction(6) >= 0.95
        assert 0.74 <= report.detection_rate_per_cp[0] <= 0.90
        assert all(r >= 0.99 for r in report.detection_rate_per_cp[1:])
        assert report.afd <= 0.30

    def test_small_run_structure(self):
        reports = ss.model_size_study(
            {"sara15": ss.sara_detector(15)}, sigma=0.1, reps=20, seed=14
        )
        report = reports["sara15"]
        assert report.replicate_count == 20
        assert sum(report.jhat_histogram.values()) == 20
        assert len(report.detection_rate_per_cp) == 6
        assert report.afd is not None
