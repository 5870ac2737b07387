"""Solvers and verifiers for a duopoly pricing game with flexible,
costly consumer learning, plus monopoly and public-learning benchmarks."""

from .costs import (
    CostKernel,
    CostModel,
    DomainError,
    entropy_kernel,
    entropy_quad_kernel,
    get_kernel,
    validate_kernel,
)
from .engine import (
    EquilibriumError,
    EquilibriumSolution,
    Prior,
    classify_regime,
    efficiency_limit_check,
    regime_thresholds,
    simulate_market,
    solve_equilibrium,
    welfare_sweep,
)
from .learning import (
    GammaValue,
    LearningSolution,
    NoRootError,
    PhiValue,
    check_global_optimality_cheap,
    check_global_optimality_expensive,
    solve_lambda_cheap,
    solve_lambda_expensive,
)
from .monopoly import monopoly_limit, solve_monopoly
from .oracle import make_grid, oracle_comparison_line_check, oracle_solve
from .pricing import (
    PriceDistribution,
    gamma_distribution,
    phi_distribution,
    verify_pricing_equilibrium,
)

__version__ = "0.1.0"
