"""Linear-programming oracle over discretized posterior beliefs.

Brute-force check of the consumer's information choice, independent of
any first-order condition: discretize the 4-state belief simplex (states
ordered (0,0), (0,1), (1,0), (1,1) for the two product values), evaluate
the net value u(x, y) - kappa c(x, y) at every lattice belief's mean
vector, and solve

    max_w  sum_i w_i obj_i   s.t.   sum_i w_i belief_i = prior,  w >= 0.

The Bayes-plausibility equalities make any feasible w a legitimate signal
(the prior-point unit mass is always feasible).  The LP duals define an
affine function of the belief that majorizes the objective on the grid —
the discrete analogue of the tangent-plane certificates used by the
analytic verifiers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .costs import CostModel

__all__ = [
    "PosteriorGrid",
    "OracleSolution",
    "LineCheckReport",
    "prior_belief",
    "make_grid",
    "oracle_solve",
    "oracle_comparison_line_check",
    "cluster_support",
    "feasibility_coupling",
]

_MEAN_CLIP = 1e-9  # pull lattice means off 0/1 before cost evaluation


def prior_belief(omega: float) -> np.ndarray:
    """Prior over the four value states for asymmetric-taste mass omega:
    (1/2 - w, w, w, 1/2 - w)."""
    if not (0.0 < omega <= 0.5):
        raise ValueError(f"omega must be in (0, 1/2], got {omega}")
    return np.array([0.5 - omega, omega, omega, 0.5 - omega])


@dataclass
class PosteriorGrid:
    """Simplex lattice over 4-state beliefs at resolution n, with the prior
    appended exactly if it is not a lattice point."""

    points: np.ndarray        # (m, 4) belief vectors
    n: int
    prior: np.ndarray
    prior_index: int

    @property
    def means(self) -> np.ndarray:
        """Per-point mean valuations (x, y) = (mu2 + mu3, mu1 + mu3)."""
        return np.column_stack([self.points[:, 2] + self.points[:, 3],
                                self.points[:, 1] + self.points[:, 3]])

    @property
    def cell_diameter(self) -> float:
        """Bound on the mean-space displacement across one lattice step."""
        return 2.0 / self.n


def make_grid(n: int, omega: float) -> PosteriorGrid:
    """All compositions of n into 4 nonnegative parts, scaled to beliefs."""
    if n < 20:
        raise ValueError(f"grid resolution must be at least 20, got {n}")
    prior = prior_belief(omega)
    pts = np.array([
        (i, j, k, n - i - j - k)
        for i in range(n + 1)
        for j in range(n + 1 - i)
        for k in range(n + 1 - i - j)
    ], dtype=float) / n
    idx = np.where(np.all(np.abs(pts - prior) < 1e-12, axis=1))[0]
    if idx.size:
        prior_index = int(idx[0])
    else:
        pts = np.vstack([pts, prior])
        prior_index = len(pts) - 1
    return PosteriorGrid(points=pts, n=n, prior=prior,
                         prior_index=prior_index)


@dataclass
class OracleSolution:
    """LP optimum: weights over grid beliefs, objective value, duals."""

    grid: PosteriorGrid
    weights: np.ndarray
    objective: float
    duals: np.ndarray          # shadow prices on the 4 belief coordinates
    support_threshold: float = 1e-9
    support_indices: np.ndarray = field(init=False)

    def __post_init__(self):
        self.support_indices = np.where(
            self.weights > self.support_threshold)[0]

    @property
    def support_means(self) -> np.ndarray:
        return self.grid.means[self.support_indices]

    @property
    def support_weights(self) -> np.ndarray:
        return self.weights[self.support_indices]

    def bayes_plausibility_error(self) -> float:
        agg = self.weights @ self.grid.points
        return float(np.max(np.abs(agg - self.grid.prior)))


def _objective_values(grid: PosteriorGrid, gross, cost) -> np.ndarray:
    """Net value at every grid mean.  ``gross`` is a callable u(x, y) or an
    object exposing .gross; ``cost`` is a CostModel or a callable returning
    the already-scaled information cost."""
    gross_fn = gross.gross if hasattr(gross, "gross") else gross
    if isinstance(cost, CostModel):
        cost_fn = lambda x, y: cost.kappa * cost.c(x, y)
    else:
        cost_fn = cost
    means = grid.means
    out = np.empty(len(means))
    for i, (x, y) in enumerate(means):
        xc = min(max(x, _MEAN_CLIP), 1.0 - _MEAN_CLIP)
        yc = min(max(y, _MEAN_CLIP), 1.0 - _MEAN_CLIP)
        out[i] = gross_fn(x, y) - cost_fn(xc, yc)
    return out


def oracle_solve(grid: PosteriorGrid, gross, cost) -> OracleSolution:
    """Solve the discretized information-design LP.

    The four Bayes-plausibility equalities subsume normalization (their
    right-hand sides sum to 1); the HiGHS backend handles the redundancy.
    """
    obj = _objective_values(grid, gross, cost)
    res = linprog(
        c=-obj,
        A_eq=grid.points.T,
        b_eq=grid.prior,
        bounds=(0.0, None),
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"LP solver failed: {res.message}")
    return OracleSolution(
        grid=grid,
        weights=res.x,
        objective=float(-res.fun),
        duals=np.asarray(res.eqlin.marginals, dtype=float) * -1.0,
    )


def cluster_support(means: np.ndarray, weights: np.ndarray,
                    radius: float) -> list[tuple[np.ndarray, float]]:
    """Greedy merge of support atoms closer than ``radius`` in mean space;
    returns (weighted-centroid, total-weight) pairs sorted by weight.
    Grid discretization splits a point mass across neighboring cells, so
    comparisons against analytic supports go through this."""
    clusters: list[list[float]] = []   # [wx, wy, w]
    order = np.argsort(-weights)
    for i in order:
        x, y, w = means[i, 0], means[i, 1], weights[i]
        for cl in clusters:
            cx, cy = cl[0] / cl[2], cl[1] / cl[2]
            if math.hypot(x - cx, y - cy) <= radius:
                cl[0] += w * x
                cl[1] += w * y
                cl[2] += w
                break
        else:
            clusters.append([w * x, w * y, w])
    out = [(np.array([c[0] / c[2], c[1] / c[2]]), c[2]) for c in clusters]
    return sorted(out, key=lambda t: -t[1])


@dataclass
class LineCheckReport:
    """Distance of the LP support from the comparison line y = 1 - x."""

    max_distance: float
    tolerance: float
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.max_distance <= self.tolerance


def oracle_comparison_line_check(solution: OracleSolution) -> LineCheckReport:
    """Every supported mean should lie within one grid cell of the line
    y = 1 - x (perpendicular distance |x + y - 1| / sqrt(2))."""
    means = solution.support_means
    dist = np.abs(means[:, 0] + means[:, 1] - 1.0) / math.sqrt(2.0)
    return LineCheckReport(
        max_distance=float(dist.max()) if len(dist) else 0.0,
        tolerance=solution.grid.cell_diameter,
    )


def feasibility_coupling(support, weights, omega: float,
                         tol: float = 1e-9):
    """Explicit martingale coupling realizing a mean distribution on the
    comparison line as a signal about the four value states.

    Variables nu[i, j] = w_i * P(state j | signal i).  Constraints: row
    sums w_i, column sums equal to the prior, and the conditional means
    reproduce (x_i, y_i).  Returns the (m, 4) matrix of joint masses nu,
    or None when the LP certifies infeasibility (e.g. any spread above
    2 omega)."""
    support = np.atleast_2d(np.asarray(support, dtype=float))
    weights = np.asarray(weights, dtype=float)
    if len(support) != len(weights):
        raise ValueError("support and weights must have equal length")
    if abs(weights.sum() - 1.0) > 1e-12 or np.any(weights < -1e-15):
        raise ValueError("weights must be a probability vector")
    prior = prior_belief(omega)
    m = len(support)

    rows = []
    rhs = []
    for i in range(m):
        r = np.zeros(4 * m)
        r[4 * i: 4 * i + 4] = 1.0
        rows.append(r)
        rhs.append(weights[i])
    for j in range(4):
        r = np.zeros(4 * m)
        r[j::4] = 1.0
        rows.append(r)
        rhs.append(prior[j])
    for i, (x, y) in enumerate(support):
        r = np.zeros(4 * m)
        r[4 * i + 2] = r[4 * i + 3] = 1.0   # P(v1 = 1 | signal i)
        rows.append(r)
        rhs.append(weights[i] * x)
        r = np.zeros(4 * m)
        r[4 * i + 1] = r[4 * i + 3] = 1.0   # P(v2 = 1 | signal i)
        rows.append(r)
        rhs.append(weights[i] * y)

    res = linprog(
        c=np.zeros(4 * m),
        A_eq=np.array(rows),
        b_eq=np.array(rhs),
        bounds=(0.0, None),
        method="highs",
    )
    if not res.success:
        return None
    nu = res.x.reshape(m, 4)
    if np.max(np.abs(np.array(rows) @ res.x - np.array(rhs))) > tol:
        return None
    return nu
