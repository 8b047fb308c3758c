"""Monte Carlo error statistics and convergence studies.

Errors are measured at the collocation grid: for a report time t the
numerical value is the block value at the last collocation midpoint
t_j <= t, and the exact solution reads the driving path through the
same midpoint (``BrownianPath.last_midpoint_value``).  Comparing both
sides at the identical path point isolates the scheme error instead of
the half-block noise of the path itself, and never interpolates the
path.  Report times are taken as given for the explicit time argument
of the exact solution, so block constancy still shows up for
deterministic problems.
"""

import math
from dataclasses import dataclass

import numpy as np

from .brownian import sample_path
from .solver import NonConvergenceError, NonFiniteIterateError, solve
from .walsh import BasisConfig, build_walsh_matrix, midpoint_floor_index

REPORT_TIMES = (0.1, 0.3, 0.5, 0.7, 0.9)

# RMS floor below which a convergence study is treated as degenerate
# (errors at rounding level carry no slope information).
DEGENERATE_RMS = 1e-13


@dataclass(frozen=True)
class ErrorStats:
    """Aggregate of |exact - numerical| at one report time.

    ``n`` counts the trials that entered the aggregate; together with
    ``failures`` it accounts for every trial requested.
    """

    t: float
    mean: float
    sd: float
    ci_lower: float
    ci_upper: float
    n: int
    failures: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("at least two successful trials are needed for statistics")


@dataclass(frozen=True)
class ConvergenceReport:
    resolutions: tuple
    rms_errors: tuple
    estimated_order: object  # float, or None when the study is degenerate


def error_at(result, problem, path, t):
    """|exact(t, path) - x_m| at the last collocation midpoint <= t."""
    if problem.exact is None:
        raise ValueError(f"problem {problem.label!r} has no exact solution")
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must lie in [0, 1), got {t}")
    j = midpoint_floor_index(result.cfg.m, t)
    return abs(float(problem.exact(t, path)) - float(result.x_colloc[j]))


def coefficient_error_norm(x, y):
    """Max absolute difference of Walsh coefficient vectors.

    Inputs are block-integral coefficient vectors; the Walsh
    coefficients of either solution are T_W @ values, i.e.
    (1/m) T_W applied to the block values.
    """
    if x.m != y.m:
        raise ValueError(f"resolution mismatch: {x.m} vs {y.m}")
    T = build_walsh_matrix(BasisConfig.from_resolution(x.m)).as_float()
    return float(np.max(np.abs(T @ (np.asarray(x) - np.asarray(y)))))


def _trial_errors(problem, cfg, n, base_seed, report_times):
    """Per-trial error rows; failed trials are counted, never absorbed."""
    rows = []
    failures = 0
    for trial in range(1, n + 1):
        path = sample_path(cfg, (base_seed, trial))
        try:
            result = solve(problem, path, cfg)
        except (NonConvergenceError, NonFiniteIterateError):
            failures += 1
            continue
        rows.append([error_at(result, problem, path, t) for t in report_times])
    return np.asarray(rows, dtype=float), failures


def monte_carlo(problem, cfg, n, base_seed, report_times=REPORT_TIMES):
    """Mean absolute error with a 95% normal confidence interval.

    Trial i draws its path from the key (base_seed, i), so any subset
    of trials is reproducible in isolation; the aggregation over the
    trial axis is order independent.
    """
    if n < 2:
        raise ValueError("need at least two trials")
    errors, failures = _trial_errors(problem, cfg, n, base_seed, report_times)
    n_eff = errors.shape[0] if errors.size else 0
    if n_eff < 2:
        raise ValueError(f"only {n_eff} of {n} trials succeeded; cannot form statistics")
    stats = []
    for idx, t in enumerate(report_times):
        col = errors[:, idx]
        mean = float(np.mean(col))
        sd = float(np.std(col, ddof=1))
        halfwidth = 1.96 * sd / math.sqrt(n_eff)
        stats.append(
            ErrorStats(
                t=float(t),
                mean=mean,
                sd=sd,
                ci_lower=mean - halfwidth,
                ci_upper=mean + halfwidth,
                n=n_eff,
                failures=failures,
            )
        )
    return stats


def convergence_study(problem, resolutions, n, base_seed, report_times=REPORT_TIMES):
    """RMS error per resolution and the least-squares order in h.

    When every RMS sits at rounding level the order is reported as
    None rather than a meaningless slope.
    """
    resolutions = tuple(int(m) for m in resolutions)
    if len(resolutions) < 3:
        raise ValueError("need at least three resolutions for an order estimate")
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise ValueError("resolutions must be strictly increasing")
    rms = []
    for m in resolutions:
        cfg = BasisConfig.from_resolution(m)
        errors, _failures = _trial_errors(problem, cfg, n, base_seed, report_times)
        if errors.shape[0] < 1:
            raise ValueError(f"every trial failed at m={m}")
        rms.append(float(np.sqrt(np.mean(np.square(errors)))))
    if max(rms) <= DEGENERATE_RMS:
        order = None
    else:
        hs = np.log([1.0 / m for m in resolutions])
        order = float(np.polyfit(hs, np.log(rms), 1)[0])
    return ConvergenceReport(
        resolutions=resolutions,
        rms_errors=tuple(rms),
        estimated_order=order,
    )
