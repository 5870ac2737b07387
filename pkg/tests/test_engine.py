import math

import numpy as np
import pytest

from compshop.costs import CostModel, entropy_kernel, entropy_quad_kernel
from compshop.engine import (
    EquilibriumError,
    Prior,
    classify_regime,
    efficiency_limit_check,
    expensive_welfare_fixed_kappa,
    misallocation_probability,
    regime_thresholds,
    sample_prices,
    simulate_market,
    solve_equilibrium,
    welfare_sweep,
)
from compshop.pricing import gamma_distribution

OMEGA = 0.25

# thresholds frozen from the bisection at rel_tol 1e-8
KAPPA_HI = 0.3667682504133236
KAPPA_LO = 0.206877330038189


def test_prior_validation():
    Prior(0.25)
    Prior(0.4)
    for bad in (0.0, -0.1, 0.41, 0.5):
        with pytest.raises(ValueError):
            Prior(bad)


def test_thresholds_frozen():
    th = regime_thresholds(entropy_kernel(), OMEGA)
    assert th.kappa_hi == pytest.approx(KAPPA_HI, abs=1e-12)
    assert th.kappa_lo == pytest.approx(KAPPA_LO, abs=1e-6)
    assert th.kappa_lo < th.kappa_hi
    assert not th.degenerate


def test_classification_contract():
    kern = entropy_kernel()
    assert classify_regime(kern, 2 * KAPPA_HI, OMEGA)[0] == "Expensive"
    assert classify_regime(kern, KAPPA_HI, OMEGA)[0] == "Expensive"
    mid = 0.5 * (KAPPA_LO + KAPPA_HI)
    assert classify_regime(kern, mid, OMEGA)[0] == "Intermediate"
    assert classify_regime(kern, KAPPA_LO / 2, OMEGA)[0] == "Cheap"
    with pytest.raises(ValueError):
        classify_regime(kern, 0.0, OMEGA)
    with pytest.raises(ValueError):
        classify_regime(kern, 1.0, 0.6)


def test_spread_hits_feasibility_bound_at_upper_threshold():
    sol = solve_equilibrium(entropy_kernel(), KAPPA_HI, OMEGA, verify=False)
    assert sol.lambda_star == pytest.approx(2 * OMEGA, abs=1e-7)


@pytest.mark.parametrize("omega", [0.1, 0.2, 0.3, 0.4])
def test_upper_threshold_decreases_with_omega(omega):
    # a larger pinning bound 2 omega means a steeper marginal spread cost
    # d'(2 omega), so the threshold kappa_hi falls with omega
    th = regime_thresholds(entropy_kernel(), omega)
    assert th.kappa_hi > 0
    if omega > 0.1:
        prev = regime_thresholds(entropy_kernel(), omega - 0.1)
        assert th.kappa_hi < prev.kappa_hi


@pytest.mark.parametrize("kappa,regime", [
    (1.0, "Expensive"), (0.3, "Intermediate"), (0.05, "Cheap")])
def test_solve_verified_each_regime(kappa, regime):
    sol = solve_equilibrium(entropy_kernel(), kappa, OMEGA)
    assert sol.regime == regime
    assert sol.checks_passed
    assert sol.pricing_report.passed and sol.learning_report.passed
    d = sol.as_dict()
    assert d["regime"] == regime and d["checks_passed"]
    if regime == "Cheap":
        assert sol.q == pytest.approx(OMEGA / sol.lambda_star, abs=1e-12)


def test_welfare_derivative_at_equilibrium_spread():
    # at the solved spread, dW/dlambda = -(1 + sqrt 2) for every Expensive
    # kappa: the learning FOC cancels the information-cost margin and
    # leaves the price-escalation term
    kern = entropy_kernel()
    for kappa in (0.5, 1.0):
        sol = solve_equilibrium(kern, kappa, OMEGA, verify=False)
        h = 1e-6
        fd = (expensive_welfare_fixed_kappa(kern, kappa, sol.lambda_star + h)
              - expensive_welfare_fixed_kappa(kern, kappa,
                                              sol.lambda_star - h)) / (2 * h)
        assert fd == pytest.approx(-1.0 - math.sqrt(2.0), abs=1e-4)


def test_welfare_monotonicity_by_regime():
    kern = entropy_kernel()
    # Expensive: welfare rises with kappa (costlier learning shrinks the
    # spread, softening price escalation)
    exp_k = [0.4, 0.6, 1.0, 2.0]
    w_exp = [solve_equilibrium(kern, k, OMEGA, verify=False).consumer_welfare
             for k in exp_k]
    assert all(b > a for a, b in zip(w_exp, w_exp[1:]))
    # Intermediate: the spread is pinned, so welfare falls linearly in kappa
    int_k = [0.22, 0.27, 0.32, 0.36]
    w_int = [solve_equilibrium(kern, k, OMEGA, verify=False).consumer_welfare
             for k in int_k]
    assert all(b < a for a, b in zip(w_int, w_int[1:]))


def test_intermediate_welfare_is_linear_in_kappa():
    kern = entropy_kernel()
    unit = CostModel(kern, 1.0)
    k1, k2 = 0.23, 0.33
    w1 = solve_equilibrium(kern, k1, OMEGA, verify=False).consumer_welfare
    w2 = solve_equilibrium(kern, k2, OMEGA, verify=False).consumer_welfare
    assert w2 - w1 == pytest.approx(-(k2 - k1) * unit.d(2 * OMEGA),
                                    abs=1e-12)


def test_welfare_continuous_at_upper_threshold():
    kern = entropy_kernel()
    eps = 1e-7
    w_lo = solve_equilibrium(kern, KAPPA_HI - eps, OMEGA,
                             verify=False).consumer_welfare
    w_hi = solve_equilibrium(kern, KAPPA_HI + eps, OMEGA,
                             verify=False).consumer_welfare
    assert w_lo == pytest.approx(w_hi, abs=1e-6)


def test_welfare_sweep_rows():
    kern = entropy_kernel()
    grid = [1.0, 0.3, 0.05]
    rows = welfare_sweep(kern, OMEGA, grid, verify=True)
    assert [r["regime"] for r in rows] == [
        "Expensive", "Intermediate", "Cheap"]
    assert all(r["checks_passed"] for r in rows)
    assert all(set(r) == {"kappa", "regime", "lambda_star", "q", "welfare",
                          "profit", "ep", "checks_passed"} for r in rows)


def test_efficiency_limit_table():
    kern = entropy_kernel()
    rows = efficiency_limit_check(kern, OMEGA, [1e-2, 1e-3, 1e-4])
    lams = [r["lambda_star"] for r in rows]
    assert all(b >= a for a, b in zip(lams, lams[1:]))
    assert lams[-1] > 0.99
    gaps = [r["support_gap_to_limit"] for r in rows]
    assert all(b <= a for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 0.02
    assert all(r["misallocation"] == 0.0 for r in rows)
    with pytest.raises(ValueError):
        efficiency_limit_check(kern, OMEGA, [1e-3, 1e-2])
    with pytest.raises(ValueError):
        efficiency_limit_check(kern, OMEGA, [1.0])  # not Cheap


def test_misallocation_scope():
    kern = entropy_kernel()
    cheap = solve_equilibrium(kern, 0.05, OMEGA, verify=False)
    assert misallocation_probability(cheap) == 0.0
    exp = solve_equilibrium(kern, 1.0, OMEGA, verify=False)
    with pytest.raises(ValueError):
        misallocation_probability(exp)


def test_sample_prices_matches_cdf():
    dist = gamma_distribution(0.6)
    rng = np.random.default_rng(7)
    draws = sample_prices(dist, rng, 20000)
    lo, hi = dist.support
    assert lo <= draws.min() and draws.max() <= hi
    for p in np.linspace(lo + 0.05, hi - 0.05, 7):
        emp = float(np.mean(draws <= p))
        assert emp == pytest.approx(dist.cdf(p),
                                    abs=4 * 0.5 / math.sqrt(20000))


@pytest.mark.parametrize("kappa", [1.0, 0.05])
def test_simulation_consistency(kappa):
    sol = solve_equilibrium(entropy_kernel(), kappa, OMEGA, verify=False)
    rep = simulate_market(sol, draws=10**5, seed=42)
    assert rep.passed, rep.as_dict()
    # determinism under a fixed seed
    rep2 = simulate_market(sol, draws=10**5, seed=42)
    assert rep.as_dict() == rep2.as_dict()
    rep3 = simulate_market(sol, draws=10**5, seed=43)
    assert rep3.welfare != rep.welfare


def test_simulation_input_validation():
    sol = solve_equilibrium(entropy_kernel(), 1.0, OMEGA, verify=False)
    with pytest.raises(ValueError):
        simulate_market(sol, draws=10**4, seed=1)
    with pytest.raises(ValueError):
        simulate_market(sol, draws=10**5, seed=None)


def test_second_kernel_equilibria():
    kern = entropy_quad_kernel()
    th = regime_thresholds(kern, OMEGA)
    assert 0 < th.kappa_lo < th.kappa_hi
    for kappa in (2 * th.kappa_hi, th.kappa_lo / 2):
        sol = solve_equilibrium(kern, kappa, OMEGA)
        assert sol.checks_passed
