"""Information-cost kernels and the bivariate posterior-separable cost.

The cost of holding posterior mean vector (x, y) is

    c(x, y) = phi(x) + phi(1 - x) + phi(y) + phi(1 - y),

scaled by kappa.  Kernels are supplied as explicit derivative quadruples
(no autodiff); ``validate_kernel`` cross-checks the derivatives against
finite differences and machine-checks the admissibility assumptions:
normalization phi(1/2) = 0, strict convexity, diverging boundary slope of
the single-coordinate cost, and the third-derivative sign condition
c_xxx <= 0 for x <= 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

EPS = 1e-12

__all__ = [
    "EPS",
    "DomainError",
    "CostKernel",
    "CostModel",
    "KernelReport",
    "entropy_kernel",
    "entropy_quad_kernel",
    "get_kernel",
    "KERNELS",
    "c_eval",
    "c_grad",
    "d_lambda",
    "validate_kernel",
]


class DomainError(ValueError):
    """Raised when a cost is evaluated outside the open unit interval."""


def _clamp(z: float) -> float:
    if not (0.0 < z < 1.0):
        raise DomainError(f"argument {z!r} outside the open interval (0, 1)")
    return min(max(z, EPS), 1.0 - EPS)


@dataclass(frozen=True)
class CostKernel:
    """Scalar kernel phi on (0, 1) with its first three derivatives.

    ``phi_log`` and ``phi_d1_log`` optionally evaluate phi(exp(u)) and
    phi'(exp(u)) stably for very negative u; they let the spread solvers
    follow roots whose distance to the frictionless limit underflows a
    double (1 - lambda* can be ~exp(-1000) at tiny kappa).
    """

    phi: Callable[[float], float]
    phi_d1: Callable[[float], float]
    phi_d2: Callable[[float], float]
    phi_d3: Callable[[float], float]
    name: str
    phi_log: Callable[[float], float] | None = None
    phi_d1_log: Callable[[float], float] | None = None

    # --- single-firm restriction: c1(z) = phi(z) + phi(1 - z) ---

    def c1(self, z: float) -> float:
        z = _clamp(z)
        return self.phi(z) + self.phi(1.0 - z)

    def c1_d1(self, z: float) -> float:
        z = _clamp(z)
        return self.phi_d1(z) - self.phi_d1(1.0 - z)

    def c1_d2(self, z: float) -> float:
        z = _clamp(z)
        return self.phi_d2(z) + self.phi_d2(1.0 - z)


@dataclass(frozen=True)
class CostModel:
    """A kernel together with the positive cost scale kappa."""

    kernel: CostKernel
    kappa: float

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    def c(self, x: float, y: float) -> float:
        return c_eval(self, x, y)

    def grad(self, x: float, y: float) -> tuple[float, float]:
        return c_grad(self, x, y)

    def d(self, lam: float) -> float:
        return d_lambda(self, lam)

    def d_d1(self, lam: float) -> float:
        """d'(lambda) for d(lambda) = c((1-lambda)/2, (1+lambda)/2)."""
        cx, cy = c_grad(self, (1.0 - lam) / 2.0, (1.0 + lam) / 2.0)
        return 0.5 * (cy - cx)

    def v(self, lam: float) -> float:
        """v(lambda) = lambda d'(lambda) - d(lambda); positive on (0, 1)."""
        return lam * self.d_d1(lam) - self.d(lam)


def c_eval(model: CostModel, x: float, y: float) -> float:
    """Bivariate cost phi(x) + phi(1-x) + phi(y) + phi(1-y)."""
    x, y = _clamp(x), _clamp(y)
    k = model.kernel
    return k.phi(x) + k.phi(1.0 - x) + k.phi(y) + k.phi(1.0 - y)


def c_grad(model: CostModel, x: float, y: float) -> tuple[float, float]:
    """(c_x, c_y) = (phi'(x) - phi'(1-x), phi'(y) - phi'(1-y))."""
    x, y = _clamp(x), _clamp(y)
    k = model.kernel
    return (k.phi_d1(x) - k.phi_d1(1.0 - x),
            k.phi_d1(y) - k.phi_d1(1.0 - y))


def d_lambda(model: CostModel, lam: float) -> float:
    """Cost on the comparison line at spread lambda: c((1-lam)/2, (1+lam)/2)."""
    if not (0.0 <= lam < 1.0):
        raise DomainError(f"spread {lam!r} outside [0, 1)")
    if lam == 0.0:
        return 0.0
    return c_eval(model, (1.0 - lam) / 2.0, (1.0 + lam) / 2.0)


# ---------------------------------------------------------------------------
# Built-in kernels
# ---------------------------------------------------------------------------

_HALF_LOG_HALF = 0.5 * math.log(0.5)


def entropy_kernel() -> CostKernel:
    """phi(z) = z log z - (1/2) log(1/2); the additive form reproduces the
    negative-entropy cost normalized to vanish at the uniform prior."""
    return CostKernel(
        phi=lambda z: z * math.log(z) - _HALF_LOG_HALF,
        phi_d1=lambda z: math.log(z) + 1.0,
        phi_d2=lambda z: 1.0 / z,
        phi_d3=lambda z: -1.0 / z**2,
        name="entropy",
        phi_log=lambda u: math.exp(u) * u - _HALF_LOG_HALF,
        phi_d1_log=lambda u: u + 1.0,
    )


def entropy_quad_kernel() -> CostKernel:
    """Entropy kernel plus a quadratic bump; a second admissible kernel that
    guards tests against entropy-specific coincidences."""
    return CostKernel(
        phi=lambda z: z * math.log(z) - _HALF_LOG_HALF + (z - 0.5) ** 2,
        phi_d1=lambda z: math.log(z) + 1.0 + 2.0 * (z - 0.5),
        phi_d2=lambda z: 1.0 / z + 2.0,
        phi_d3=lambda z: -1.0 / z**2,
        name="entropy_quad",
        phi_log=lambda u: math.exp(u) * u - _HALF_LOG_HALF
        + (math.exp(u) - 0.5) ** 2,
        phi_d1_log=lambda u: u + 2.0 * math.exp(u),
    )


KERNELS: dict[str, Callable[[], CostKernel]] = {
    "entropy": entropy_kernel,
    "entropy_quad": entropy_quad_kernel,
}


def get_kernel(name: str) -> CostKernel:
    try:
        return KERNELS[name]()
    except KeyError:
        raise ValueError(
            f"unknown kernel {name!r}; available: {sorted(KERNELS)}"
        ) from None


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class KernelReport:
    """Pass/fail record for each admissibility check."""

    kernel_name: str
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, passed: bool, detail: str = ""):
        self.checks[name] = bool(passed)
        self.details[name] = detail


def validate_kernel(kernel: CostKernel, *, seed: int = 0) -> KernelReport:
    """Machine-check the admissibility assumptions on a kernel.

    Checks: phi(1/2) = 0; phi'' > 0 on a grid; diverging boundary slope of
    the single-coordinate cost derivative; c_xxx <= 0 for x <= 1/2; and
    consistency of the supplied derivatives with central finite differences.
    """
    rep = KernelReport(kernel_name=kernel.name)

    val = kernel.phi(0.5)
    rep.record("normalization", abs(val) < 1e-12, f"phi(1/2) = {val:.3e}")

    grid = np.linspace(0.01, 0.99, 99)
    d2 = np.array([kernel.phi_d2(z) for z in grid])
    rep.record("convexity", bool(np.all(d2 > 0)),
               f"min phi'' on grid = {d2.min():.3e}")

    # Diverging slope at the boundary: the relevant object is the derivative
    # of the single-coordinate cost phi(z) + phi(1-z), which must blow up at
    # both ends (the raw phi' may stay bounded at one end).
    slope_near = abs(kernel.phi_d1(1e-6) - kernel.phi_d1(1.0 - 1e-6))
    slope_far = abs(kernel.phi_d1(1e-3) - kernel.phi_d1(1.0 - 1e-3))
    rep.record("boundary_slope",
               slope_near > 10.0 and slope_near > 1.5 * slope_far,
               f"|c1'| at 1e-6: {slope_near:.3e}, at 1e-3: {slope_far:.3e}")

    # c_xxx(x, y) = phi'''(x) - phi'''(1-x) <= 0 where the proofs use it
    # (x <= 1/2); the global statement is ambiguous for entropy.
    xs = np.linspace(0.01, 0.5, 50)
    cxxx = np.array([kernel.phi_d3(x) - kernel.phi_d3(1.0 - x) for x in xs])
    rep.record("third_derivative_sign", bool(np.all(cxxx <= 1e-12)),
               f"max c_xxx on x<=1/2 grid = {cxxx.max():.3e}")

    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.05, 0.95, size=1000)
    h = 1e-6
    ok = True
    worst = 0.0
    for z in pts:
        fd1 = (kernel.phi(z + h) - kernel.phi(z - h)) / (2 * h)
        fd2 = (kernel.phi_d1(z + h) - kernel.phi_d1(z - h)) / (2 * h)
        fd3 = (kernel.phi_d2(z + h) - kernel.phi_d2(z - h)) / (2 * h)
        for fd, an in ((fd1, kernel.phi_d1(z)), (fd2, kernel.phi_d2(z)),
                       (fd3, kernel.phi_d3(z))):
            rel = abs(fd - an) / max(1.0, abs(an))
            worst = max(worst, rel)
            if rel > 1e-5:
                ok = False
    rep.record("derivative_consistency", ok,
               f"worst relative mismatch = {worst:.3e}")

    return rep
