"""Numerical integration settings and probability results with provenance."""

from dataclasses import dataclass
import math

import numpy as np
from scipy.integrate import cubature

__all__ = ["QuadratureSpec", "ProbabilityEstimate", "NumericalError", "integrate_box"]

# nodes per region of the tensor Gauss-Kronrod rules
_RULE_NODES = {"gk21": 21, "gk15": 15}


class NumericalError(RuntimeError):
    """Quadrature did not reach the requested tolerance; ``partial`` holds
    the best estimate obtained."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tolerance: float = 1e-6
    abs_tolerance: float = 1e-9
    max_evaluations: int = 2_000_000_000
    truncation_tail_mass: float = 1e-10

    def __post_init__(self):
        if not (self.rel_tolerance > 0 and self.abs_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evaluations < 1000:
            raise ValueError("max_evaluations must be >= 1000")
        if not 0 < self.truncation_tail_mass < 1:
            raise ValueError("truncation_tail_mass must lie in (0, 1)")

    def halved(self) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tolerance / 2, self.abs_tolerance / 2,
                              self.max_evaluations, self.truncation_tail_mass / 2)


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    error_bound: float
    method: str
    detail: str = ""

    METHODS = ("quadrature", "monte_carlo", "closed_form")

    def __post_init__(self):
        if self.method not in self.METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability {self.value} outside [0, 1]")
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be non-negative")

    @classmethod
    def clamped(cls, value, error_bound, method, detail=""):
        """Clip ``value`` into [0, 1], widening the bound by the clipped
        amount."""
        v = float(value)
        c = min(max(v, 0.0), 1.0)
        return cls(c, float(error_bound) + abs(v - c), method, detail)

    def complement(self, detail: str = "") -> "ProbabilityEstimate":
        return ProbabilityEstimate(1.0 - self.value, self.error_bound, self.method,
                                   detail or f"1 - ({self.detail})")

    def __float__(self):
        return self.value

    @property
    def interval(self):
        return (self.value - self.error_bound, self.value + self.error_bound)


def integrate_box(f, lower, upper, q: QuadratureSpec, rule: str | None = None):
    """Adaptive cubature of a vectorized integrand over a box.

    ``f`` receives an ``(n, dim)`` array of nodes and returns ``(n,)`` values.
    Returns ``(estimate, error_estimate)``; raises :class:`NumericalError`
    if the tolerance is not met within ``q.max_evaluations``.
    """
    dim = len(lower)
    if rule is None:
        rule = "gk21" if dim <= 2 else "gk15"
    per_region = _RULE_NODES[rule] ** dim
    max_sub = max(1, q.max_evaluations // per_region)
    res = cubature(
        f, np.asarray(lower, float), np.asarray(upper, float),
        rule=rule, rtol=q.rel_tolerance, atol=q.abs_tolerance,
        max_subdivisions=max_sub,
    )
    est = float(res.estimate)
    err = float(res.error)
    if res.status != "converged" or not math.isfinite(est):
        raise NumericalError(
            f"cubature did not converge (estimate {est:.6g}, error {err:.3g})", partial=est
        )
    return est, err
