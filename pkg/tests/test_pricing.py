import math

import numpy as np
import pytest

from compshop.pricing import (
    SQRT2,
    ThreePointValuation,
    TwoPointValuation,
    expected_profit,
    gamma_distribution,
    gamma_expected_price,
    phi_distribution,
    phi_expected_price,
    point_mass_distribution,
    profit_three_point,
    profit_two_point,
    verify_pricing_equilibrium,
)

# value frozen from an independent quadrature of the two-piece mean
GAMMA_EP_OVER_LAM = 2.542037629673099


@pytest.mark.parametrize("lam", [0.1, 1.0])
def test_gamma_junction_continuity(lam):
    dist = gamma_distribution(lam)
    p_mid = (1.0 + SQRT2) * lam
    low, high = dist.pieces
    target = 1.0 / (2.0 + SQRT2)
    assert low.cdf(p_mid) == pytest.approx(target, abs=1e-12)
    assert high.cdf(p_mid) == pytest.approx(target, abs=1e-12)


@pytest.mark.parametrize("lam", [0.1, 1.0])
def test_gamma_equal_profit_and_no_deviation(lam):
    dist = gamma_distribution(lam)
    rep = verify_pricing_equilibrium(dist, TwoPointValuation(lam))
    assert rep.passed, rep.as_dict()
    # equal profit at the closed-form level (1 + sqrt2)/2 * lam
    assert rep.k == pytest.approx((1.0 + SQRT2) / 2.0 * lam, abs=1e-10)
    assert rep.max_on_support_dev < 1e-8 * lam
    assert rep.max_off_support_excess <= 1e-8 * lam


@pytest.mark.parametrize("lam", [0.1, 1.0])
def test_gamma_expected_price(lam):
    dist = gamma_distribution(lam)
    assert dist.mean() / lam == pytest.approx(GAMMA_EP_OVER_LAM, abs=1e-8)
    assert gamma_expected_price(lam) / lam == pytest.approx(
        GAMMA_EP_OVER_LAM, abs=1e-12)


def test_gamma_quantile_roundtrip():
    dist = gamma_distribution(0.7)
    for u in np.linspace(0.001, 0.999, 37):
        assert dist.cdf(dist.quantile(u)) == pytest.approx(u, abs=1e-9)


@pytest.mark.parametrize("lam,q", [(1.0, 0.25), (0.5, 0.1), (0.8, 0.4)])
def test_phi_equal_profit(lam, q):
    dist = phi_distribution(lam, q)
    rep = verify_pricing_equilibrium(dist, ThreePointValuation(lam, q))
    assert rep.passed, rep.as_dict()
    assert rep.k == pytest.approx((1 - q) * q * lam / (1 - 2 * q), abs=1e-10)


def test_phi_expected_price_closed_form():
    lam, q = 0.9, 0.3
    dist = phi_distribution(lam, q)
    assert dist.mean() == pytest.approx(phi_expected_price(lam, q), abs=1e-9)


def test_phi_below_support_branch_monotonicity():
    """Below the support the deviation profit is increasing for q = 0.40
    but loses monotonicity by q = 0.45, bracketing the tie-mass bound."""
    lam = 1.0
    for q, expect_monotone in ((0.40, True), (0.45, False)):
        dist = phi_distribution(lam, q)
        p_lo = dist.support[0]
        ps = np.linspace(1e-6, p_lo, 400)
        prof = [profit_three_point(p, dist, lam, q) for p in ps]
        monotone = bool(np.all(np.diff(prof) > -1e-12))
        assert monotone == expect_monotone, (q, monotone)


def test_point_mass_probe_fails_verification():
    lam = 0.5
    dist = point_mass_distribution(SQRT2 * lam)
    rep = verify_pricing_equilibrium(dist, TwoPointValuation(lam))
    assert not rep.passed


def test_profit_dispatch_and_validation():
    lam = 0.5
    dist = gamma_distribution(lam)
    assert expected_profit(1.0, dist, TwoPointValuation(lam)) == \
        profit_two_point(1.0, dist, lam)
    with pytest.raises(ValueError):
        profit_two_point(-1.0, dist, lam)
    with pytest.raises(ValueError):
        ThreePointValuation(1.0, 0.45)
    with pytest.raises(ValueError):
        gamma_distribution(0.0)
    with pytest.raises(ValueError):
        verify_pricing_equilibrium(dist, TwoPointValuation(lam),
                                   price_grid_size=100)


def test_sampling_matches_cdf():
    dist = gamma_distribution(1.0)
    rng = np.random.default_rng(11)
    draws = dist.sample(rng, 4000)
    lo, hi = dist.support
    assert lo <= draws.min() and draws.max() <= hi
    for p in np.linspace(lo + 0.1, hi - 0.1, 5):
        emp = float(np.mean(draws <= p))
        assert emp == pytest.approx(dist.cdf(p), abs=4 * 0.5 / math.sqrt(4000))
