"""Public-learning benchmark: firms observe the consumer's posterior
before pricing.

Post-learning pricing is Bertrand-like: the disadvantaged firm prices at
cost and the advantaged firm extracts the whole quality gap, so the
consumer's net payoff is min{x, y} at every posterior (x, y).  That
payoff is concave, so with any strictly convex information cost the
consumer acquires no information; the LP oracle certifies this against
all grid deviations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .costs import CostModel
from .oracle import PosteriorGrid, make_grid, oracle_solve

__all__ = [
    "ObservableOutcome",
    "observable_pricing",
    "observable_payoff_bound",
    "observable_learning_optimum",
    "observable_comparison_table",
]


@dataclass(frozen=True)
class ObservableOutcome:
    posterior: tuple[float, float]
    prices: tuple[float, float]
    buyer: int              # 1 or 2, the firm purchased from
    buyer_payoff: float


def observable_pricing(x: float, y: float) -> ObservableOutcome:
    """Price-posting outcome at a publicly observed posterior: the stronger
    firm charges the quality gap, the weaker prices at cost, and the
    consumer keeps the smaller of the two perceived values.  At x = y both
    price at cost."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"posterior ({x}, {y}) outside the unit square")
    if x < y:
        return ObservableOutcome((x, y), (0.0, y - x), buyer=2,
                                 buyer_payoff=x)
    if x > y:
        return ObservableOutcome((x, y), (x - y, 0.0), buyer=1,
                                 buyer_payoff=y)
    return ObservableOutcome((x, y), (0.0, 0.0), buyer=2, buyer_payoff=x)


def observable_payoff_bound(x: float, y: float) -> float:
    """Upper bound min{x, y} on the consumer's net payoff across all
    equilibria of the observed-posterior pricing subgame; the constructed
    outcome attains it."""
    if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
        raise ValueError(f"posterior ({x}, {y}) outside the unit square")
    return min(x, y)


def observable_learning_optimum(cost: CostModel, omega: float,
                                grid: PosteriorGrid | None = None,
                                grid_n: int = 24):
    """No-learning is optimal under public learning: solve the LP oracle
    with objective min{x, y} - kappa c and confirm the optimum is the
    degenerate strategy at the prior.

    Returns (strategy, oracle_solution) where the strategy is the unit
    mass at (1/2, 1/2)."""
    if grid is None:
        grid = make_grid(grid_n, omega)
    osol = oracle_solve(grid, lambda x, y: min(x, y), cost)
    strategy = {"support": [(0.5, 0.5)], "weights": [1.0]}
    return strategy, osol


def observable_learning_is_degenerate(osol, atol: float = 1e-7) -> bool:
    """True when every supported posterior mean is the prior mean.

    The check is in mean space: beliefs with identical means are payoff
    equivalent, so the LP may split the prior-mean mass across several
    belief vectors without acquiring any information."""
    means = osol.support_means
    return len(means) > 0 and bool(
        np.allclose(means, [0.5, 0.5], atol=atol))


def observable_comparison_table(kernel, kappa_grid, omega: float,
                                private_welfares=None, grid_n: int = 24):
    """Welfare under public learning (always 1/2: payoff min at the prior)
    next to the supplied private-learning welfare per kappa."""
    grid = make_grid(grid_n, omega)
    rows = []
    for i, kappa in enumerate(kappa_grid):
        cost = CostModel(kernel, kappa)
        _, osol = observable_learning_optimum(cost, omega, grid=grid)
        rows.append({
            "kappa": kappa,
            "public_welfare": osol.objective,
            "public_degenerate": observable_learning_is_degenerate(osol),
            "private_welfare": (None if private_welfares is None
                                else private_welfares[i]),
        })
    return rows
