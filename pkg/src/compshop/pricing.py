"""Mixed-strategy pricing distributions for the two conjectured value
distributions, with profit functions and no-deviation verification.

Two games are covered.  In the two-point game the consumer values the
firms' products at (0, lambda) or (lambda, 0), each with probability 1/2;
the equilibrium price distribution Gamma has two pieces on
[sqrt(2) lambda, (2 + sqrt(2)) lambda].  In the three-point game a tie
valuation (0, 0) occurs with probability 1 - 2q; the equilibrium price
distribution Phi is a single piece of width lambda.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

SQRT2 = math.sqrt(2.0)

__all__ = [
    "Piece",
    "PriceDistribution",
    "TwoPointValuation",
    "ThreePointValuation",
    "PricingReport",
    "gamma_distribution",
    "phi_distribution",
    "gamma_expected_price",
    "phi_expected_price",
    "profit_two_point",
    "profit_three_point",
    "expected_profit",
    "verify_pricing_equilibrium",
    "point_mass_distribution",
]


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    cdf: Callable[[float], float]
    pdf: Callable[[float], float]
    ppf: Callable[[float], float] | None = None  # inverse CDF, if closed form


@dataclass(frozen=True)
class PriceDistribution:
    """Piecewise price CDF with support [pieces[0].lo, pieces[-1].hi]."""

    pieces: tuple[Piece, ...]

    @property
    def support(self) -> tuple[float, float]:
        return (self.pieces[0].lo, self.pieces[-1].hi)

    def cdf(self, p: float) -> float:
        lo, hi = self.support
        if p <= lo:
            return 0.0
        if p >= hi:
            return 1.0
        for piece in self.pieces:
            if p <= piece.hi:
                return float(piece.cdf(p))
        return 1.0

    def sf(self, p: float) -> float:
        return 1.0 - self.cdf(p)

    def pdf(self, p: float) -> float:
        lo, hi = self.support
        if p < lo or p > hi:
            return 0.0
        for piece in self.pieces:
            if p <= piece.hi:
                return float(piece.pdf(p))
        return 0.0

    def quantile(self, u: float, tol: float = 1e-12) -> float:
        """Inverse CDF by closed form where available, else bisection."""
        if not (0.0 <= u <= 1.0):
            raise ValueError(f"quantile level {u} outside [0, 1]")
        for piece in self.pieces:
            if u <= self.cdf(piece.hi) + tol or piece is self.pieces[-1]:
                if piece.ppf is not None:
                    return float(piece.ppf(min(u, 1.0)))
                lo, hi = piece.lo, piece.hi
                while hi - lo > tol:
                    mid = 0.5 * (lo + hi)
                    if piece.cdf(mid) < u:
                        lo = mid
                    else:
                        hi = mid
                return 0.5 * (lo + hi)
        raise RuntimeError("unreachable")

    def mean(self) -> float:
        total = 0.0
        for piece in self.pieces:
            total += quad(lambda p: p * piece.pdf(p), piece.lo, piece.hi,
                          epsabs=1e-12, epsrel=1e-12)[0]
        return total

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        return np.array([self.quantile(ui) for ui in u])


@dataclass(frozen=True)
class TwoPointValuation:
    """Valuations (0, lambda) / (lambda, 0), each with probability 1/2."""

    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


@dataclass(frozen=True)
class ThreePointValuation:
    """Valuations (0, lambda), (lambda, 0) with probability q each and a
    tie (0, 0) with probability 1 - 2q, where 0 < q <= 2/5."""

    lam: float
    q: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if not (0.0 < self.q <= 0.4):
            raise ValueError(f"q must be in (0, 2/5], got {self.q}")


# ---------------------------------------------------------------------------
# Equilibrium distributions
# ---------------------------------------------------------------------------

def gamma_distribution(lam: float) -> PriceDistribution:
    """Two-piece equilibrium price distribution of the two-point game."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    p_lo = SQRT2 * lam
    p_mid = (1.0 + SQRT2) * lam
    p_hi = (2.0 + SQRT2) * lam

    low = Piece(
        lo=p_lo, hi=p_mid,
        cdf=lambda p: (p - SQRT2 * lam) / (lam + p),
        pdf=lambda p: (1.0 + SQRT2) * lam / (lam + p) ** 2,
        ppf=lambda u: (SQRT2 + u) * lam / (1.0 - u),
    )
    high = Piece(
        lo=p_mid, hi=p_hi,
        cdf=lambda p: ((3.0 + SQRT2) * lam - 2.0 * p) / (lam - p),
        pdf=lambda p: (1.0 + SQRT2) * lam / (lam - p) ** 2,
        ppf=lambda u: (3.0 + SQRT2 - u) * lam / (2.0 - u),
    )
    return PriceDistribution(pieces=(low, high))


def phi_distribution(lam: float, q: float) -> PriceDistribution:
    """Single-piece equilibrium price distribution of the three-point game."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    if not (0.0 < q < 0.5):
        raise ValueError(f"q must be in (0, 1/2), got {q}")
    p_lo = q * lam / (1.0 - 2.0 * q)
    p_hi = p_lo + lam
    a = (1.0 - q) / (1.0 - 2.0 * q)

    piece = Piece(
        lo=p_lo, hi=p_hi,
        cdf=lambda p: (1.0 - q) * (p * (1.0 - 2.0 * q) - lam * q)
        / (p * (1.0 - 2.0 * q) ** 2),
        pdf=lambda p: (1.0 - q) * lam * q / ((1.0 - 2.0 * q) ** 2 * p ** 2),
        ppf=lambda u: p_lo / (1.0 - u / a),
    )
    return PriceDistribution(pieces=(piece,))


def gamma_expected_price(lam: float) -> float:
    """E[p] under Gamma: ((sqrt2+1) log(sqrt2+1) + sqrt2 - 1) lambda."""
    return ((SQRT2 + 1.0) * math.log(SQRT2 + 1.0) + SQRT2 - 1.0) * lam


def phi_expected_price(lam: float, q: float) -> float:
    """E[p] under Phi: q (1-q) lambda log((1-q)/q) / (1-2q)^2."""
    return q * (1.0 - q) * lam * math.log((1.0 - q) / q) / (1.0 - 2.0 * q) ** 2


def point_mass_distribution(p0: float, width: float = 1e-9) -> PriceDistribution:
    """Near-degenerate distribution used as a falsification probe."""
    piece = Piece(
        lo=p0, hi=p0 + width,
        cdf=lambda p: min(max((p - p0) / width, 0.0), 1.0),
        pdf=lambda p: 1.0 / width,
        ppf=lambda u: p0 + u * width,
    )
    return PriceDistribution(pieces=(piece,))


# ---------------------------------------------------------------------------
# Profits
# ---------------------------------------------------------------------------

def profit_two_point(p: float, opponent: PriceDistribution, lam: float) -> float:
    """Expected profit of a firm pricing at p against an opponent playing
    ``opponent`` when the consumer holds two-point valuations.

    The firm wins its advantaged type iff the opponent's price exceeds
    p - lambda and its disadvantaged type iff it exceeds p + lambda; ties
    are measure-zero under an atomless opponent.
    """
    if p < 0:
        raise ValueError("price must be nonnegative")
    return p * 0.5 * (opponent.sf(p - lam) + opponent.sf(p + lam))


def profit_three_point(p: float, opponent: PriceDistribution,
                       lam: float, q: float) -> float:
    """Expected profit in the three-point game: advantaged type (mass q),
    tie type (mass 1 - 2q), disadvantaged type (mass q)."""
    if p < 0:
        raise ValueError("price must be nonnegative")
    return p * (q * opponent.sf(p - lam)
                + (1.0 - 2.0 * q) * opponent.sf(p)
                + q * opponent.sf(p + lam))


def expected_profit(p: float, opponent: PriceDistribution,
                    valuation: TwoPointValuation | ThreePointValuation) -> float:
    if isinstance(valuation, TwoPointValuation):
        return profit_two_point(p, opponent, valuation.lam)
    return profit_three_point(p, opponent, valuation.lam, valuation.q)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class PricingReport:
    """Equal-profit / no-deviation / atom-scan verification record."""

    k: float
    max_on_support_dev: float
    max_off_support_excess: float
    max_cdf_jump: float
    grid_size: int
    tol_scale: float
    passed: bool = field(init=False)

    def __post_init__(self):
        tol = 1e-8 * self.tol_scale
        self.passed = (self.max_on_support_dev < tol
                       and self.max_off_support_excess <= tol
                       and self.max_cdf_jump < 1e-8)

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "max_on_support_dev": self.max_on_support_dev,
            "max_off_support_excess": self.max_off_support_excess,
            "max_cdf_jump": self.max_cdf_jump,
            "grid_size": self.grid_size,
            "passed": self.passed,
        }


def verify_pricing_equilibrium(
    dist: PriceDistribution,
    valuation: TwoPointValuation | ThreePointValuation,
    price_grid_size: int = 1000,
) -> PricingReport:
    """Check the equal-profit principle on the support, scan off-support
    deviations, and scan for atoms.

    The candidate equilibrium profit k is computed from the lowest support
    price, so the report is meaningful for non-equilibrium inputs too.
    """
    if price_grid_size < 1000:
        raise ValueError("price grid must have at least 10^3 points")
    lam = valuation.lam
    p_min, p_max = dist.support
    k = expected_profit(p_min, dist, valuation)

    on_grid = np.linspace(p_min, p_max, price_grid_size)
    on_dev = max(abs(expected_profit(p, dist, valuation) - k) for p in on_grid)

    lo = max(0.0, p_min - 2.0 * lam)
    below = np.linspace(lo, p_min, price_grid_size, endpoint=False)
    above = np.linspace(p_max, p_max + 2.0 * lam, price_grid_size + 1)[1:]
    off_excess = max(expected_profit(p, dist, valuation) - k
                     for p in np.concatenate([below, above]))

    # Atom scan: a jump of the CDF across a vanishing window flags a point
    # mass; continuous pieces contribute ~pdf * 2 delta, far below tolerance.
    delta = 1e-12 * max(1.0, p_max)
    scan = np.linspace(p_min, p_max, price_grid_size)
    max_jump = max(dist.cdf(p + delta) - dist.cdf(p - delta) for p in scan)

    return PricingReport(
        k=float(k),
        max_on_support_dev=float(on_dev),
        max_off_support_excess=float(off_excess),
        max_cdf_jump=max_jump,
        grid_size=price_grid_size,
        tol_scale=lam,
    )
