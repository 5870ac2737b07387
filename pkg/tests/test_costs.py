import math

import numpy as np
import pytest

from compshop.costs import (
    CostModel,
    DomainError,
    KERNELS,
    c_eval,
    c_grad,
    d_lambda,
    entropy_kernel,
    entropy_quad_kernel,
    get_kernel,
    validate_kernel,
)
from compshop.learning import verify_comparison_shopping_structure


@pytest.fixture(params=sorted(KERNELS))
def kernel(request):
    return get_kernel(request.param)


def test_all_kernels_validate(kernel):
    rep = validate_kernel(kernel)
    assert rep.ok, rep.details


def test_normalization_and_symmetry():
    k = entropy_kernel()
    assert abs(k.phi(0.5)) < 1e-15
    m = CostModel(k, 1.0)
    # cost vanishes at the uniform prior and is symmetric in each argument
    assert abs(c_eval(m, 0.5, 0.5)) < 1e-14
    assert c_eval(m, 0.3, 0.8) == pytest.approx(c_eval(m, 0.7, 0.2), abs=1e-14)


def test_domain_errors():
    m = CostModel(entropy_kernel(), 1.0)
    with pytest.raises(DomainError):
        c_eval(m, 0.0, 0.5)
    with pytest.raises(DomainError):
        c_eval(m, 0.5, 1.0)
    with pytest.raises(DomainError):
        d_lambda(m, 1.0)
    with pytest.raises(ValueError):
        CostModel(entropy_kernel(), 0.0)


def test_gradient_matches_fd(kernel):
    m = CostModel(kernel, 1.0)
    rng = np.random.default_rng(3)
    h = 1e-6
    for x, y in rng.uniform(0.05, 0.95, size=(50, 2)):
        gx, gy = c_grad(m, x, y)
        fx = (c_eval(m, x + h, y) - c_eval(m, x - h, y)) / (2 * h)
        fy = (c_eval(m, x, y + h) - c_eval(m, x, y - h)) / (2 * h)
        assert gx == pytest.approx(fx, abs=1e-7)
        assert gy == pytest.approx(fy, abs=1e-7)


def test_spread_cost_and_derivative(kernel):
    m = CostModel(kernel, 1.0)
    # d(0) = 0, d increasing and convex in the spread; v = lam d' - d > 0
    assert d_lambda(m, 0.0) == 0.0
    lams = np.linspace(0.05, 0.95, 19)
    d = np.array([m.d(l) for l in lams])
    assert np.all(np.diff(d) > 0)
    h = 1e-6
    for lam in (0.2, 0.5, 0.8):
        fd = (m.d(lam + h) - m.d(lam - h)) / (2 * h)
        assert m.d_d1(lam) == pytest.approx(fd, abs=1e-7)
        assert m.v(lam) > 0


def test_entropy_closed_forms():
    k = entropy_kernel()
    # single-firm restriction: c1'(z) = log(z / (1-z)) for entropy
    for z in (0.1, 0.3, 0.7):
        assert k.c1_d1(z) == pytest.approx(math.log(z / (1 - z)), abs=1e-12)
    # log-argument hooks agree with the direct evaluation where both exist
    for u in (-5.0, -20.0, -100.0):
        s = math.exp(u)
        assert k.phi_d1_log(u) == pytest.approx(k.phi_d1(s), abs=1e-12)
        if s > 1e-300:
            assert k.phi_log(u) == pytest.approx(k.phi(s), abs=1e-12)


def test_unknown_kernel():
    with pytest.raises(ValueError, match="unknown kernel"):
        get_kernel("nope")


def test_boundary_slope_divergence_detected():
    # a bounded-slope kernel must fail validation
    from compshop.costs import CostKernel
    quad_only = CostKernel(
        phi=lambda z: (z - 0.5) ** 2,
        phi_d1=lambda z: 2 * (z - 0.5),
        phi_d2=lambda z: 2.0,
        phi_d3=lambda z: 0.0,
        name="quad_only",
    )
    rep = validate_kernel(quad_only)
    assert not rep.checks["boundary_slope"]
    assert not rep.ok


def test_comparison_shopping_structure(kernel):
    rep = verify_comparison_shopping_structure(CostModel(kernel, 0.3))
    assert rep.passed, rep.as_dict()
