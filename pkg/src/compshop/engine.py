"""Full-game assembly: regime classification, jointly verified equilibria,
welfare accounting, comparative-statics sweeps, and Monte Carlo.

Regimes by cost scale kappa:
  Expensive    kappa >= kappa_hi : interior two-point learning, two-piece
                                   pricing at the first-order spread.
  Intermediate kappa in [lo, hi) : two-point learning pinned at the
                                   feasibility bound lambda = 2 omega.
  Cheap        kappa <  kappa_lo : three-point learning (extremes + prior),
                                   single-piece pricing with q = omega/lambda.

kappa_hi is where the unconstrained first-order spread hits 2 omega;
kappa_lo is the largest kappa at which the three-point construction both
has a root and passes the tangent-line certificate (boolean bisection —
the existence argument is nonconstructive, so certification defines the
boundary).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .costs import CostKernel, CostModel, c_eval
from .learning import (
    GammaValue,
    LearningSolution,
    NoRootError,
    OptimalityReport,
    P1_CONSTANT,
    PhiValue,
    check_global_optimality_cheap,
    check_global_optimality_expensive,
    d_spread_from_log,
    solve_lambda_cheap,
    solve_lambda_expensive,
)
from .oracle import feasibility_coupling, prior_belief
from .pricing import (
    PriceDistribution,
    PricingReport,
    ThreePointValuation,
    TwoPointValuation,
    gamma_distribution,
    phi_distribution,
    verify_pricing_equilibrium,
)

SQRT2 = math.sqrt(2.0)

__all__ = [
    "Prior",
    "RegimeThresholds",
    "EquilibriumSolution",
    "EquilibriumError",
    "SimulationReport",
    "classify_regime",
    "regime_thresholds",
    "solve_equilibrium",
    "consumer_welfare",
    "expensive_welfare_fixed_kappa",
    "welfare_sweep",
    "efficiency_limit_check",
    "misallocation_probability",
    "sample_prices",
    "simulate_market",
]


@dataclass(frozen=True)
class Prior:
    """Symmetric full-support prior over the four value states, indexed by
    the mass omega on each anti-diagonal corner (0,1) / (1,0)."""

    omega: float

    def __post_init__(self):
        if not (0.0 < self.omega <= 0.4):
            raise ValueError(
                f"omega must be in (0, 2/5], got {self.omega}")

    @property
    def belief(self) -> np.ndarray:
        return prior_belief(self.omega)


class EquilibriumError(RuntimeError):
    """A solved instance failed joint verification; never returned silently."""


# ---------------------------------------------------------------------------
# Regime thresholds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegimeThresholds:
    kappa_lo: float
    kappa_hi: float
    degenerate: bool


_THRESHOLDS_CACHE: dict[tuple[str, float], RegimeThresholds] = {}


def _kappa_hi(kernel: CostKernel, omega: float) -> float:
    """The kappa at which the unconstrained first-order spread equals
    2 omega.  The first-order condition 2 P1 + 2 kappa d'(lambda) = 1
    inverts in closed form."""
    unit = CostModel(kernel, 1.0)
    return (1.0 - 2.0 * P1_CONSTANT) / (2.0 * unit.d_d1(2.0 * omega))


def _cheap_certified(kernel: CostKernel, kappa: float, omega: float,
                     grid_size: int = 200) -> bool:
    try:
        sol = solve_lambda_cheap(kernel, kappa, omega)
    except NoRootError:
        return False
    cost = CostModel(kernel, kappa)
    vf = PhiValue(sol.lambda_star, sol.q, cost)
    return check_global_optimality_cheap(sol, vf, grid_size=grid_size).passed


def regime_thresholds(kernel: CostKernel, omega: float,
                      rel_tol: float = 1e-8) -> RegimeThresholds:
    """Compute (kappa_lo, kappa_hi), caching per kernel name and omega."""
    key = (kernel.name, omega)
    if key in _THRESHOLDS_CACHE:
        return _THRESHOLDS_CACHE[key]
    hi = _kappa_hi(kernel, omega)

    # kappa_lo: boolean bisection on "cheap construction certified".
    lo = hi / 2.0
    tries = 0
    while not _cheap_certified(kernel, lo, omega):
        lo /= 2.0
        tries += 1
        if tries > 60:
            lo = 0.0
            break
    if lo > 0.0:
        a, b = lo, hi
        while b - a > rel_tol * hi:
            mid = 0.5 * (a + b)
            if _cheap_certified(kernel, mid, omega):
                a = mid
            else:
                b = mid
        lo = a
    out = RegimeThresholds(kappa_lo=lo, kappa_hi=hi,
                           degenerate=(hi - lo) < 1e-8 * max(hi, 1.0))
    if out.degenerate:
        warnings.warn(
            f"regime thresholds coincide for kernel {kernel.name!r}, "
            f"omega={omega}: the pinned interval is degenerate")
    _THRESHOLDS_CACHE[key] = out
    return out


def classify_regime(kernel: CostKernel, kappa: float, omega: float):
    """Return (regime, thresholds) with regime one of Expensive,
    Intermediate, Cheap."""
    Prior(omega)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    th = regime_thresholds(kernel, omega)
    if kappa >= th.kappa_hi:
        return "Expensive", th
    if kappa >= th.kappa_lo:
        return "Intermediate", th
    return "Cheap", th


# ---------------------------------------------------------------------------
# Equilibrium assembly
# ---------------------------------------------------------------------------

@dataclass
class EquilibriumSolution:
    regime: str
    kappa: float
    omega: float
    kernel: CostKernel
    lambda_star: float
    learning: LearningSolution
    pricing: PriceDistribution
    valuation: TwoPointValuation | ThreePointValuation
    consumer_welfare: float
    firm_profit: float
    expected_price: float
    pricing_report: PricingReport | None = None
    learning_report: OptimalityReport | None = None
    thresholds: RegimeThresholds | None = None

    @property
    def q(self) -> float | None:
        return self.learning.q

    @property
    def checks_passed(self) -> bool:
        return ((self.pricing_report is None or self.pricing_report.passed)
                and (self.learning_report is None
                     or self.learning_report.passed))

    def as_dict(self) -> dict:
        return {
            "regime": self.regime,
            "kappa": self.kappa,
            "omega": self.omega,
            "kernel": self.kernel.name,
            "lambda_star": self.lambda_star,
            "q": self.q,
            "consumer_welfare": self.consumer_welfare,
            "firm_profit": self.firm_profit,
            "expected_price": self.expected_price,
            "learning_support": [list(p) for p in self.learning.support],
            "learning_weights": list(self.learning.weights),
            "checks_passed": self.checks_passed,
            "pricing_report": (None if self.pricing_report is None
                               else self.pricing_report.as_dict()),
            "learning_report": (None if self.learning_report is None
                                else self.learning_report.as_dict()),
        }


def _gamma_welfare(lam: float, cost: CostModel, vf: GammaValue) -> float:
    """Two-point-regime welfare: value at the support point,
    (1 + lam)/2 - E[p] + overlap(lam) - kappa d(lam)."""
    return (0.5 + lam / 2.0 - vf.ep + vf.t1(lam)
            - cost.kappa * cost.d(lam))


def _phi_welfare(learning: LearningSolution, cost: CostModel,
                 vf: PhiValue) -> float:
    """Three-point-regime welfare: extreme posteriors (mass 2q) buy the
    advantaged firm at its price; the tie posterior (mass 1 - 2q) buys the
    cheaper firm.  The spread cost is taken through the log-stable form so
    deep-in-the-tail spreads (lambda rounding to 1) stay evaluable."""
    lam, q = learning.lambda_star, learning.q
    dval = d_spread_from_log(cost.kernel, learning.log_one_minus_lambda)
    extreme = (1.0 + lam) / 2.0 - vf.ep - cost.kappa * dval
    tie = 0.5 - vf.expected_min_price()
    return 2.0 * q * extreme + (1.0 - 2.0 * q) * tie


def solve_equilibrium(kernel: CostKernel, kappa: float, omega: float,
                      verify: bool = True,
                      price_grid_size: int = 1000,
                      learning_grid_size: int = 1000) -> EquilibriumSolution:
    """Solve both stages jointly for the classified regime and (optionally)
    run both verification reports; raises EquilibriumError if either
    fails."""
    regime, th = classify_regime(kernel, kappa, omega)
    cost = CostModel(kernel, kappa)

    if regime in ("Expensive", "Intermediate"):
        try:
            learning = solve_lambda_expensive(kernel, kappa, omega)
        except NoRootError as exc:
            raise EquilibriumError(f"{regime} learning stage: {exc}") from exc
        lam = learning.lambda_star
        vf = GammaValue(lam, cost)
        pricing = gamma_distribution(lam)
        valuation = TwoPointValuation(lam)
        welfare = _gamma_welfare(lam, cost, vf)
        profit = (1.0 + SQRT2) / 2.0 * lam
        ep = vf.ep
        checker = check_global_optimality_expensive
    else:
        try:
            learning = solve_lambda_cheap(kernel, kappa, omega)
        except NoRootError as exc:
            raise EquilibriumError(f"Cheap learning stage: {exc}") from exc
        lam, q = learning.lambda_star, learning.q
        vf = PhiValue(lam, q, cost)
        pricing = phi_distribution(lam, q)
        valuation = ThreePointValuation(lam, q)
        welfare = _phi_welfare(learning, cost, vf)
        profit = (1.0 - q) * q * lam / (1.0 - 2.0 * q)
        ep = vf.ep
        checker = check_global_optimality_cheap

    sol = EquilibriumSolution(
        regime=regime, kappa=kappa, omega=omega, kernel=kernel,
        lambda_star=lam, learning=learning, pricing=pricing,
        valuation=valuation, consumer_welfare=welfare, firm_profit=profit,
        expected_price=ep, thresholds=th,
    )
    if verify:
        sol.pricing_report = verify_pricing_equilibrium(
            pricing, valuation, price_grid_size=price_grid_size)
        sol.learning_report = checker(learning, vf,
                                      grid_size=learning_grid_size)
        if not sol.checks_passed:
            failed = []
            if not sol.pricing_report.passed:
                failed.append(f"pricing: {sol.pricing_report.as_dict()}")
            if not sol.learning_report.passed:
                failed.append(f"learning: {sol.learning_report.as_dict()}")
            raise EquilibriumError(
                f"no certified equilibrium at kappa={kappa}, omega={omega} "
                f"({regime}); " + "; ".join(failed))
    return sol


def consumer_welfare(sol: EquilibriumSolution) -> float:
    return sol.consumer_welfare


def expensive_welfare_fixed_kappa(kernel: CostKernel, kappa: float,
                                  lam: float) -> float:
    """Welfare of the two-point construction as a function of the spread at
    fixed kappa (for finite-difference derivative checks around the
    equilibrium spread)."""
    cost = CostModel(kernel, kappa)
    vf = GammaValue(lam, cost)
    return _gamma_welfare(lam, cost, vf)


def welfare_sweep(kernel: CostKernel, omega: float, kappa_grid,
                  verify: bool = False) -> list[dict]:
    """Per-kappa equilibrium summary rows in stable column order."""
    rows = []
    for kappa in kappa_grid:
        sol = solve_equilibrium(kernel, kappa, omega, verify=verify)
        rows.append({
            "kappa": kappa,
            "regime": sol.regime,
            "lambda_star": sol.lambda_star,
            "q": sol.q,
            "welfare": sol.consumer_welfare,
            "profit": sol.firm_profit,
            "ep": sol.expected_price,
            "checks_passed": sol.checks_passed,
        })
    return rows


def misallocation_probability(sol: EquilibriumSolution) -> float:
    """P(purchase from the ex-post-disadvantaged firm at an extreme
    posterior).  In the Cheap regime the price support has width exactly
    lambda, so the price gap can never offset the value gap: identically
    zero.  (Not defined for the two-point regimes, where values are never
    commonly known.)"""
    if sol.regime != "Cheap":
        raise ValueError("misallocation accounting applies to Cheap only")
    p_lo, p_hi = sol.pricing.support
    width = p_hi - p_lo
    if width > sol.lambda_star * (1.0 + 1e-12):
        raise EquilibriumError(
            f"price support width {width} exceeds the spread "
            f"{sol.lambda_star}")
    return 0.0


def efficiency_limit_check(kernel: CostKernel, omega: float,
                           kappa_grid) -> list[dict]:
    """Vanishing-frictions table: along a decreasing Cheap-regime grid the
    spread rises to 1, the support approaches {(0,1), (1/2,1/2), (1,0)},
    and misallocation is identically zero."""
    kappa_grid = list(kappa_grid)
    if any(b >= a for a, b in zip(kappa_grid, kappa_grid[1:])):
        raise ValueError("kappa grid must be strictly decreasing")
    rows = []
    for kappa in kappa_grid:
        sol = solve_equilibrium(kernel, kappa, omega, verify=False)
        if sol.regime != "Cheap":
            raise ValueError(f"kappa={kappa} is not in the Cheap regime")
        targets = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)]
        gap = max(math.hypot(sx - tx, sy - ty)
                  for (sx, sy), (tx, ty)
                  in zip(sorted(sol.learning.support), targets))
        rows.append({
            "kappa": kappa,
            "lambda_star": sol.lambda_star,
            "q": sol.q,
            "misallocation": misallocation_probability(sol),
            "support_gap_to_limit": gap,
        })
    return rows


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def sample_prices(dist: PriceDistribution, rng: np.random.Generator,
                  size: int) -> np.ndarray:
    """Vectorized inverse-CDF sampling using each piece's closed-form
    quantile (levels are global across pieces)."""
    u = rng.random(size)
    out = np.empty(size)
    lo_level = 0.0
    for piece in dist.pieces:
        hi_level = dist.cdf(piece.hi)
        mask = (u >= lo_level) & (u <= hi_level)
        if piece.ppf is None:
            out[mask] = [dist.quantile(ui) for ui in u[mask]]
        else:
            out[mask] = piece.ppf(u[mask])
        lo_level = hi_level
    return out


_STATE_VALUES = np.array([(0, 0), (0, 1), (1, 0), (1, 1)], dtype=float)


@dataclass
class SimulationReport:
    draws: int
    seed: int
    profit_1: float
    profit_2: float
    profit_se: float
    analytic_profit: float
    welfare: float
    welfare_se: float
    analytic_welfare: float
    share_1: float
    disadvantaged_purchases: int
    profit_ok: bool = field(init=False)
    welfare_ok: bool = field(init=False)
    share_ok: bool = field(init=False)

    def __post_init__(self):
        self.profit_ok = (
            abs(self.profit_1 - self.analytic_profit) <= 4 * self.profit_se
            and abs(self.profit_2 - self.analytic_profit)
            <= 4 * self.profit_se)
        self.welfare_ok = (abs(self.welfare - self.analytic_welfare)
                           <= 4 * self.welfare_se)
        share_se = 0.5 / math.sqrt(self.draws)
        self.share_ok = abs(self.share_1 - 0.5) <= 4 * share_se

    @property
    def passed(self) -> bool:
        return self.profit_ok and self.welfare_ok and self.share_ok

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "draws", "seed", "profit_1", "profit_2", "profit_se",
            "analytic_profit", "welfare", "welfare_se", "analytic_welfare",
            "share_1", "disadvantaged_purchases", "profit_ok", "welfare_ok",
            "share_ok")}


def simulate_market(sol: EquilibriumSolution, draws: int,
                    seed: int) -> SimulationReport:
    """Monte Carlo replay of a solved instance: state from the prior,
    posterior from an explicit signal coupling, prices i.i.d. from the
    pricing distribution, purchase from the firm with the higher perceived
    net value.  Information costs are charged per realized signal."""
    if draws < 10**5:
        raise ValueError("at least 10^5 draws required")
    if seed is None:
        raise ValueError("a seed is required for reproducibility")
    rng = np.random.default_rng(seed)
    prior = prior_belief(sol.omega)
    support = np.asarray(sol.learning.support, dtype=float)
    weights = np.asarray(sol.learning.weights, dtype=float)
    nu = feasibility_coupling(support, weights, sol.omega)
    if nu is None:
        raise EquilibriumError("learning strategy is not a fusion of the "
                               "prior; no signal coupling exists")

    states = rng.choice(4, size=draws, p=prior)
    signals = np.empty(draws, dtype=int)
    for j in range(4):
        mask = states == j
        cond = np.clip(nu[:, j] / prior[j], 0.0, None)
        cond /= cond.sum()
        signals[mask] = rng.choice(len(support), size=mask.sum(), p=cond)

    x = support[signals, 0]
    y = support[signals, 1]
    values = _STATE_VALUES[states]
    p1 = sample_prices(sol.pricing, rng, draws)
    p2 = sample_prices(sol.pricing, rng, draws)

    buy1 = (x - p1) > (y - p2)
    price_paid = np.where(buy1, p1, p2)
    value_got = np.where(buy1, values[:, 0], values[:, 1])

    cost = CostModel(sol.kernel, sol.kappa)
    info_cost = np.array([
        sol.kappa * c_eval(cost, min(max(sx, 1e-9), 1 - 1e-9),
                           min(max(sy, 1e-9), 1 - 1e-9))
        for sx, sy in support])[signals]
    welfare_draws = value_got - price_paid - info_cost

    rev1 = np.where(buy1, p1, 0.0)
    rev2 = np.where(buy1, 0.0, p2)
    profit_se = float(np.std(rev1) / math.sqrt(draws))

    # ex-post-disadvantaged purchases at extreme posteriors: buying the
    # firm whose perceived value is the lower one
    extreme = np.abs(y - x) > 1e-12
    wrong = extreme & (buy1 != (x > y))

    return SimulationReport(
        draws=draws,
        seed=seed,
        profit_1=float(rev1.mean()),
        profit_2=float(rev2.mean()),
        profit_se=profit_se,
        analytic_profit=sol.firm_profit,
        welfare=float(welfare_draws.mean()),
        welfare_se=float(np.std(welfare_draws) / math.sqrt(draws)),
        analytic_welfare=sol.consumer_welfare,
        share_1=float(buy1.mean()),
        disadvantaged_purchases=int(wrong.sum()),
    )
