"""Monte Carlo error statistics and convergence studies."""

import math

import numpy as np
import pytest

from walshvie.brownian import sample_path
from walshvie.experiment import (
    DEGENERATE_RMS,
    REPORT_TIMES,
    ErrorStats,
    coefficient_error_norm,
    convergence_study,
    error_at,
    monte_carlo,
)
from walshvie.solver import ProblemSpec, builtin_example, solve
from walshvie.walsh import BasisConfig, CoefficientVector


def exp_problem():
    # deterministic e^t with its exact solution attached
    return ProblemSpec(
        x0=1.0,
        k1=1.0,
        k2=0.0,
        beta=lambda x: x,
        sigma=lambda x: 0.0 * x,
        exact=lambda t, path: math.exp(t),
        label="exp",
    )


def constant_problem():
    return ProblemSpec(
        x0=0.5,
        k1=0.0,
        k2=0.0,
        beta=lambda x: 0.0 * x,
        sigma=lambda x: 0.0 * x,
        exact=lambda t, path: 0.5,
        label="const",
    )


class TestErrorAt:
    def test_uses_last_midpoint(self):
        cfg = BasisConfig.from_resolution(16)
        prob = builtin_example(1)
        path = sample_path(cfg, seed=21)
        res = solve(prob, path, cfg)
        # 0.9 maps to midpoint index 13 (27/32)
        expected = abs(prob.exact(0.9, path) - res.x_colloc[13])
        assert error_at(res, prob, path, 0.9) == expected

    def test_at_exact_midpoint(self):
        cfg = BasisConfig.from_resolution(8)
        prob = builtin_example(2)
        path = sample_path(cfg, seed=2)
        res = solve(prob, path, cfg)
        t = cfg.midpoints[5]
        assert error_at(res, prob, path, t) == abs(prob.exact(t, path) - res.x_colloc[5])

    def test_requires_exact(self):
        cfg = BasisConfig.from_resolution(8)
        prob = ProblemSpec(x0=0.0, k1=0.0, k2=0.0, beta=lambda x: x, sigma=lambda x: x)
        path = sample_path(cfg, seed=2)
        res = solve(prob, path, cfg)
        with pytest.raises(ValueError):
            error_at(res, prob, path, 0.5)

    def test_domain(self):
        cfg = BasisConfig.from_resolution(8)
        prob = constant_problem()
        path = sample_path(cfg, seed=2)
        res = solve(prob, path, cfg)
        with pytest.raises(ValueError):
            error_at(res, prob, path, 1.0)


class TestCoefficientErrorNorm:
    def test_zero_for_equal(self):
        x = CoefficientVector(4, np.array([1.0, 2.0, 3.0, 4.0]))
        assert coefficient_error_norm(x, x) == 0.0

    def test_single_block_difference(self):
        # Walsh column for block 0 is all ones, so the norm is the gap
        x = CoefficientVector(4, np.array([1.0, 2.0, 3.0, 4.0]))
        y = CoefficientVector(4, np.array([1.25, 2.0, 3.0, 4.0]))
        assert abs(coefficient_error_norm(x, y) - 0.25) < 1e-15

    def test_resolution_mismatch(self):
        with pytest.raises(ValueError):
            coefficient_error_norm(
                CoefficientVector(2, np.zeros(2)), CoefficientVector(4, np.zeros(4))
            )


class TestMonteCarlo:
    def test_report_times_default(self):
        assert REPORT_TIMES == (0.1, 0.3, 0.5, 0.7, 0.9)

    def test_stats_shape_and_accounting(self):
        cfg = BasisConfig.from_resolution(16)
        stats = monte_carlo(builtin_example(1), cfg, 10, base_seed=42)
        assert len(stats) == 5
        for s, t in zip(stats, REPORT_TIMES):
            assert s.t == t
            assert s.n == 10
            assert s.failures == 0
            assert s.ci_lower <= s.mean <= s.ci_upper
            assert s.sd >= 0.0

    def test_reproducible(self):
        cfg = BasisConfig.from_resolution(8)
        a = monte_carlo(builtin_example(2), cfg, 6, base_seed=7)
        b = monte_carlo(builtin_example(2), cfg, 6, base_seed=7)
        assert [s.mean for s in a] == [s.mean for s in b]
        assert [s.sd for s in a] == [s.sd for s in b]

    def test_trial_keying_matches_manual_loop(self):
        # trial i draws path (base, i); the mean must equal a hand loop
        cfg = BasisConfig.from_resolution(8)
        prob = builtin_example(1)
        stats = monte_carlo(prob, cfg, 5, base_seed=31, report_times=(0.5,))
        manual = []
        for trial in range(1, 6):
            path = sample_path(cfg, (31, trial))
            res = solve(prob, path, cfg)
            manual.append(error_at(res, prob, path, 0.5))
        assert stats[0].mean == np.mean(manual)

    def test_degenerate_problem_errors_vanish(self):
        cfg = BasisConfig.from_resolution(16)
        stats = monte_carlo(builtin_example(2, a="0"), cfg, 5, base_seed=3)
        for s in stats:
            assert s.mean <= 1e-12

    def test_needs_two_trials(self):
        cfg = BasisConfig.from_resolution(8)
        with pytest.raises(ValueError):
            monte_carlo(builtin_example(1), cfg, 1, base_seed=0)

    @pytest.mark.filterwarnings("ignore:overflow")
    def test_failures_counted_not_absorbed(self):
        # positive feedback makes solve diverge on wide paths only
        cfg = BasisConfig.from_resolution(8)
        prob = ProblemSpec(
            x0=0.5,
            k1=0.0,
            k2=0.8,
            beta=lambda x: 0.0 * x,
            sigma=lambda x: np.exp(x * x),
            exact=lambda t, path: 0.5,
            label="feedback",
        )
        stats = monte_carlo(prob, cfg, 12, base_seed=0)
        assert stats[0].failures >= 1
        assert stats[0].n >= 2
        assert stats[0].n + stats[0].failures == 12

    def test_zero_trials_rejected(self):
        cfg = BasisConfig.from_resolution(8)
        with pytest.raises(ValueError):
            monte_carlo(exp_problem(), cfg, 0, base_seed=1)

    def test_ci_width_shrinks_like_sqrt_n(self):
        # doubling trials narrows the mean CI width by roughly sqrt(2)
        cfg = BasisConfig.from_resolution(8)
        prob = builtin_example(1)
        ratios = []
        for base in (50, 51, 52):
            w20 = np.mean([s.ci_upper - s.ci_lower for s in monte_carlo(prob, cfg, 20, base)])
            w40 = np.mean([s.ci_upper - s.ci_lower for s in monte_carlo(prob, cfg, 40, base)])
            ratios.append(w20 / w40)
        assert 1.25 <= np.mean(ratios) <= 1.6


class TestErrorStatsValidation:
    def test_rejects_single_trial(self):
        with pytest.raises(ValueError):
            ErrorStats(t=0.5, mean=0.0, sd=0.0, ci_lower=0.0, ci_upper=0.0, n=1, failures=0)


class TestConvergenceStudy:
    def test_deterministic_order_near_one(self):
        # block-constant reconstruction at fixed report times: order 1
        report = convergence_study(exp_problem(), (8, 16, 32, 64, 128), 2, base_seed=1)
        assert report.resolutions == (8, 16, 32, 64, 128)
        assert len(report.rms_errors) == 5
        assert all(e > 0 for e in report.rms_errors)
        assert 0.8 <= report.estimated_order <= 1.2

    def test_rms_decreases(self):
        report = convergence_study(exp_problem(), (8, 32, 128), 2, base_seed=1)
        assert report.rms_errors[0] > report.rms_errors[1] > report.rms_errors[2]

    def test_degenerate_study_has_no_order(self):
        report = convergence_study(constant_problem(), (4, 8, 16), 3, base_seed=5)
        assert max(report.rms_errors) <= DEGENERATE_RMS
        assert report.estimated_order is None

    def test_needs_three_increasing_resolutions(self):
        with pytest.raises(ValueError):
            convergence_study(exp_problem(), (8, 16), 2, base_seed=1)
        with pytest.raises(ValueError):
            convergence_study(exp_problem(), (16, 8, 32), 2, base_seed=1)
