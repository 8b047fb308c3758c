"""Walsh-basis collocation for nonlinear stochastic Volterra integral equations.

Solves x(t) = x0 + int_0^t k1(s,t) beta(x(s)) ds
            + int_0^t k2(s,t) sigma(x(s)) dB(s)   on [0, 1)

by projecting onto m = 2^k Walsh functions, replacing both integrals
with operational matrices, and collocating at the block midpoints,
which collapses the discrete system to m scalar fixed-point equations.

Quick start::

    from walshvie import BasisConfig, builtin_example, sample_path, solve

    problem = builtin_example(1)
    cfg = BasisConfig.from_resolution(16)
    path = sample_path(cfg, seed=7)
    result = solve(problem, path, cfg)
    print(result.x_colloc)
"""

from .brownian import BrownianPath, sample_path, zero_path
from .experiment import (
    REPORT_TIMES,
    ConvergenceReport,
    ErrorStats,
    coefficient_error_norm,
    convergence_study,
    error_at,
    monte_carlo,
)
from .expressions import ExpressionError, compile_expression
from .operational import (
    IntegrationMatrix,
    StochasticMatrix,
    diag_extract,
    diag_lift,
    integration_matrix,
    stochastic_matrix,
    walsh_domain,
)
from .oracle import OracleResult, euler_maruyama
from .problemfile import encode_problem, parse_problem_file, problem_from_text
from .solver import (
    NonConvergenceError,
    NonFiniteIterateError,
    ProblemSpec,
    SolveResult,
    SolverOptions,
    assemble_H,
    builtin_example,
    collocation_values,
    problem_from_sources,
    reconstruct,
    solve,
)
from .walsh import (
    BasisConfig,
    CoefficientVector,
    KernelMatrix,
    WalshMatrix,
    build_walsh_matrix,
    midpoint_floor_index,
    project_function,
    project_kernel,
    rademacher,
    walsh,
)

__version__ = "0.1.0"

__all__ = [
    "BasisConfig",
    "BrownianPath",
    "CoefficientVector",
    "ConvergenceReport",
    "ErrorStats",
    "ExpressionError",
    "IntegrationMatrix",
    "KernelMatrix",
    "NonConvergenceError",
    "NonFiniteIterateError",
    "OracleResult",
    "ProblemSpec",
    "REPORT_TIMES",
    "SolveResult",
    "SolverOptions",
    "StochasticMatrix",
    "WalshMatrix",
    "assemble_H",
    "build_walsh_matrix",
    "builtin_example",
    "coefficient_error_norm",
    "collocation_values",
    "compile_expression",
    "convergence_study",
    "diag_extract",
    "diag_lift",
    "encode_problem",
    "error_at",
    "euler_maruyama",
    "integration_matrix",
    "midpoint_floor_index",
    "monte_carlo",
    "parse_problem_file",
    "problem_from_sources",
    "problem_from_text",
    "project_function",
    "project_kernel",
    "rademacher",
    "reconstruct",
    "sample_path",
    "solve",
    "stochastic_matrix",
    "walsh",
    "walsh_domain",
    "zero_path",
]
