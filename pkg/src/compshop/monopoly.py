"""Single-seller benchmark with a binary valuation.

The equilibrium has the consumer randomizing over posteriors by a
truncated Pareto distribution F(x) = 1 - x_lo/x on [x_lo, x_hi] (with an
atom at x_hi) and the firm randomizing over prices by
G(p) = kappa (c'(p) - c'(x_lo)) on the same interval.  The endpoints solve

    M1:  1 = kappa (c'(x_hi) - c'(x_lo))
    M2:  1 + log(x_hi / x_lo) - mu / x_lo = 0,

where c is the single-firm cost phi(z) + phi(1 - z).

At small kappa the upper endpoint approaches 1 so fast that 1 - x_hi can
underflow a double (for the entropy kernel 1 - x_hi ~ exp(-1/kappa)), so
the solver tracks u = log(1 - x_hi) and uses the kernel's log-argument
hooks when available.  Integrals against the price density are rewritten
by parts in terms of the bounded CDF G so they stay accurate when the
density blows up at the upper endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import brentq

from .costs import CostKernel, validate_kernel

__all__ = [
    "MonopolySolution",
    "NoSolutionError",
    "solve_monopoly",
    "monopoly_limit",
    "monopoly_convergence_sweep",
]

_QUAD_KW = dict(epsabs=1e-12, epsrel=1e-12, limit=200)

# below exp(_LOG_TINY) a double cannot represent 1 - x_hi at full precision
_LOG_TINY = math.log(1e-250)


class NoSolutionError(RuntimeError):
    """The M1/M2 system has no solution inside the open interval."""


def _c1_d1_upper(kernel: CostKernel, u: float) -> float:
    """c'(1 - s) evaluated at s = exp(u), stable for very negative u."""
    if u > _LOG_TINY:
        s = math.exp(u)
        return kernel.phi_d1(1.0 - max(s, 1e-15)) - kernel.phi_d1(s)
    if kernel.phi_d1_log is None:
        raise NoSolutionError(
            f"kernel {kernel.name!r} lacks the log-argument derivative hook "
            "needed this close to the frictionless limit")
    return kernel.phi_d1(1.0 - 1e-15) - kernel.phi_d1_log(u)


def _exp_guarded(u: float) -> float:
    return math.exp(u) if u > -700.0 else 0.0


@dataclass
class MonopolySolution:
    """Equilibrium posterior and price distributions of the benchmark.

    ``x_hi`` may round to 1.0 at small kappa; ``log_one_minus_x_hi``
    carries the exact location of the upper endpoint in that regime.
    """

    x_lo: float
    x_hi: float
    mu: float
    kappa: float
    kernel: CostKernel
    log_one_minus_x_hi: float | None = None

    def __post_init__(self):
        if self.log_one_minus_x_hi is None:
            if self.x_hi >= 1.0:
                raise ValueError(
                    "x_hi at or above 1 requires log_one_minus_x_hi")
            self.log_one_minus_x_hi = math.log1p(-self.x_hi)

    # --- posterior distribution F ---

    def F(self, x: float) -> float:
        if x < self.x_lo:
            return 0.0
        if x >= self.x_hi:
            return 1.0
        return 1.0 - self.x_lo / x

    def f_density(self, x: float) -> float:
        if self.x_lo <= x < self.x_hi:
            return self.x_lo / x**2
        return 0.0

    @property
    def atom_at_x_hi(self) -> float:
        return self.x_lo / self.x_hi

    # --- price distribution G ---

    def G(self, p: float) -> float:
        if p <= self.x_lo:
            return 0.0
        if p >= self.x_hi:
            return 1.0
        val = self.kappa * (self.kernel.c1_d1(p)
                            - self.kernel.c1_d1(self.x_lo))
        return min(val, 1.0)

    def g_density(self, p: float) -> float:
        if self.x_lo <= p <= self.x_hi:
            return self.kappa * self.kernel.c1_d2(p)
        return 0.0

    # --- derived quantities ---

    def residuals(self) -> tuple[float, float]:
        c_hi = _c1_d1_upper(self.kernel, self.log_one_minus_x_hi)
        r1 = 1.0 - self.kappa * (c_hi - self.kernel.c1_d1(self.x_lo))
        log_x_hi = math.log1p(-_exp_guarded(self.log_one_minus_x_hi))
        r2 = 1.0 + log_x_hi - math.log(self.x_lo) - self.mu / self.x_lo
        return (r1, r2)

    def posterior_mean(self) -> float:
        """Mean of F (continuous part has the closed form
        x_lo log(x_hi/x_lo)); equals mu by M2."""
        log_x_hi = math.log1p(-_exp_guarded(self.log_one_minus_x_hi))
        cont = self.x_lo * (log_x_hi - math.log(self.x_lo))
        return cont + self.x_hi * self.atom_at_x_hi

    def expected_price(self) -> float:
        """E[p] = x_lo + integral of 1 - G; the survival form avoids the
        endpoint singularity of the density."""
        tail = quad(lambda p: 1.0 - self.G(p), self.x_lo, min(self.x_hi, 1.0),
                    **_QUAD_KW)[0]
        return self.x_lo + tail

    def survival_inclusive(self, p: float) -> float:
        """P(posterior >= p); includes the atom at x_hi (ties broken toward
        purchase)."""
        if p > self.x_hi:
            return 0.0
        s = 1.0 - self.F(p)
        if p >= self.x_hi:
            s += self.atom_at_x_hi
        return s

    def firm_profit(self, p: float) -> float:
        """p P(posterior >= p); constant and equal to x_lo on the support."""
        return p * self.survival_inclusive(p)

    def consumer_net_value(self, x: float) -> float:
        """Purchase surplus at posterior x minus the information cost;
        ties at x = p broken toward purchase (measure-zero under G)."""
        m = min(x, self.x_hi)
        if m > self.x_lo:
            surplus = (x - m) * self.G(m) + quad(self.G, self.x_lo, m,
                                                 **_QUAD_KW)[0]
        else:
            surplus = 0.0
        return surplus - self.kappa * self.kernel.c1(x)

    def consumer_welfare(self) -> float:
        """Equilibrium consumer payoff; on the support the net value is the
        affine function -kappa c'(x_lo) x + kappa (x_lo c'(x_lo) - c(x_lo)),
        so the expectation is that function at the prior mean."""
        cp = self.kernel.c1_d1(self.x_lo)
        return self.kappa * (-cp * self.mu + self.x_lo * cp
                             - self.kernel.c1(self.x_lo))

    def trade_failure_prob(self) -> float:
        """P(posterior < price) under independent draws from F and G; the
        consumer walks away (keeps the zero outside option) there.
        Integration by parts: (1 - x_lo/x_hi) - x_lo int G(p)/p^2 dp."""
        corr = quad(lambda p: self.G(p) / p**2, self.x_lo,
                    min(self.x_hi, 1.0), **_QUAD_KW)[0]
        return 1.0 - self.x_lo / self.x_hi - self.x_lo * corr


def _x_lo_from_m2(log_x_hi: float, mu: float) -> float:
    """Solve M2 for x_lo in (0, mu) given log(x_hi); the residual is
    strictly increasing in x_lo on that interval."""
    def m2(x_lo):
        return 1.0 + log_x_hi - math.log(x_lo) - mu / x_lo

    if m2(mu) < 0:
        raise NoSolutionError("M2 has no root below the prior mean")
    return brentq(m2, 1e-14, mu, xtol=1e-16, rtol=8.9e-16)


def solve_monopoly(kernel: CostKernel, kappa: float, mu: float,
                   check_kernel: bool = False) -> MonopolySolution:
    """Solve the M1/M2 system by an outer root-find on u = log(1 - x_hi)
    with x_lo recovered from M2 at each trial."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    if not (0.0 < mu < 1.0):
        raise ValueError(f"mu must be in (0, 1), got {mu}")
    if check_kernel and not validate_kernel(kernel).ok:
        raise ValueError(f"kernel {kernel.name!r} fails validation")

    def m1_residual(u):
        log_x_hi = math.log1p(-_exp_guarded(u))
        x_lo = _x_lo_from_m2(log_x_hi, mu)
        return kappa * (_c1_d1_upper(kernel, u)
                        - kernel.c1_d1(x_lo)) - 1.0

    # u decreases as x_hi increases; the residual is increasing as u falls
    u_hi = math.log1p(-(mu + 1e-10))
    if m1_residual(u_hi) > 0:
        raise NoSolutionError(
            "kappa too large: M1 already exceeds 1 at x_hi just above the "
            "prior mean")
    u_lo = u_hi - 1.0
    while m1_residual(u_lo) < 0:
        u_lo = u_hi + 2.0 * (u_lo - u_hi)
        if u_lo < -1e9:
            raise NoSolutionError(
                "no sign change found for M1 down to log(1 - x_hi) = -1e9")
    u = brentq(m1_residual, u_lo, u_hi, xtol=1e-13, rtol=8.9e-16)
    log_x_hi = math.log1p(-_exp_guarded(u))
    x_lo = _x_lo_from_m2(log_x_hi, mu)
    return MonopolySolution(x_lo=x_lo, x_hi=-math.expm1(u), mu=mu,
                            kappa=kappa, kernel=kernel,
                            log_one_minus_x_hi=u)


def monopoly_limit(mu: float) -> float:
    """Frictionless-limit lower posterior: the unique root in (0, mu) of
    1 - log(a) - mu / a = 0."""
    if not (0.0 < mu < 1.0):
        raise ValueError(f"mu must be in (0, 1), got {mu}")

    def h(a):
        return 1.0 - math.log(a) - mu / a

    return brentq(h, 1e-12, mu - 1e-15, xtol=1e-16, rtol=8.9e-16)


def monopoly_convergence_sweep(kernel: CostKernel, mu: float,
                               kappa_grid, probe_price: float = 0.9):
    """Repeated solves along a decreasing kappa grid; returns one row per
    kappa with the endpoints and the price-CDF value at the probe."""
    kappa_grid = list(kappa_grid)
    if any(b >= a for a, b in zip(kappa_grid, kappa_grid[1:])):
        raise ValueError("kappa grid must be strictly decreasing")
    rows = []
    for kappa in kappa_grid:
        sol = solve_monopoly(kernel, kappa, mu)
        rows.append({
            "kappa": kappa,
            "x_lo": sol.x_lo,
            "x_hi": sol.x_hi,
            "log_one_minus_x_hi": sol.log_one_minus_x_hi,
            "G_probe": sol.G(probe_price),
            "expected_price": sol.expected_price(),
            "consumer_welfare": sol.consumer_welfare(),
            "trade_failure_prob": sol.trade_failure_prob(),
        })
    return rows
