"""Homogeneous Poisson point processes on disks, counter-based random
streams, and the ordered-distance densities of a planar PPP."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaincc, gammaln

__all__ = [
    "PppConfig",
    "PointSet",
    "PppConfigError",
    "MAX_EXPECTED_POINTS",
    "stream",
    "sample_ppp",
    "kth_neighbor_distance_pdf",
    "kth_ordered_bs_distance_pdf",
    "ordered_distance_tail",
    "quantile_radius",
    "interference_guard_radius",
    "default_window_radius",
]

MAX_EXPECTED_POINTS = 1e8


class PppConfigError(ValueError):
    pass


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream addressed by ``(master_seed, *key)``.

    Streams for distinct keys are statistically independent, and the stream
    for a given key does not depend on which other keys were drawn before, so
    work can be replayed in any order.
    """
    words = [int(master_seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) for k in key]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


@dataclass(frozen=True)
class PppConfig:
    density: float
    window_radius: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not (math.isfinite(self.density) and self.density > 0):
            raise PppConfigError(f"density must be finite and > 0, got {self.density}")
        if not (math.isfinite(self.window_radius) and self.window_radius > 0):
            raise PppConfigError(f"window_radius must be finite and > 0, got {self.window_radius}")
        if self.expected_count > MAX_EXPECTED_POINTS:
            raise PppConfigError(
                f"expected point count {self.expected_count:.3g} exceeds {MAX_EXPECTED_POINTS:.0e}"
            )

    @property
    def expected_count(self) -> float:
        return self.density * math.pi * self.window_radius**2


@dataclass(frozen=True, eq=False)
class PointSet:
    points: np.ndarray = field(repr=False)
    generating_seed: int
    window: PppConfig

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (
            isinstance(other, PointSet)
            and self.generating_seed == other.generating_seed
            and self.window == other.window
            and np.array_equal(self.points, other.points)
        )

    __hash__ = None


def uniform_disk(rng: np.random.Generator, n, radius: float):
    """``n`` i.i.d. uniform points on a centered disk, as ``(x, y)`` arrays
    (``n`` may be a shape tuple)."""
    r = radius * np.sqrt(rng.random(n))
    a = 2.0 * np.pi * rng.random(n)
    return r * np.cos(a), r * np.sin(a)


def sample_ppp(cfg: PppConfig, seed: int) -> PointSet:
    """One realization of a homogeneous PPP restricted to the disk window."""
    rng = stream(seed)
    n = int(rng.poisson(cfg.expected_count))
    x, y = uniform_disk(rng, n, cfg.window_radius)
    pts = np.column_stack((x + cfg.center[0], y + cfg.center[1]))
    return PointSet(pts, int(seed), cfg)


def kth_neighbor_distance_pdf(d, k: int, density: float):
    """Density of the distance to the ``k``-th nearest point of a PPP of the
    given density, ``exp(-m) 2 m^k / (d (k-1)!)`` with ``m = density pi d^2``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if density <= 0:
        raise ValueError("density must be > 0")
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    pos = d > 0
    safe = np.where(pos, d, 1.0)
    m = density * math.pi * safe * safe
    log_d = np.log(safe)
    # log of 2 m^k / (d (k-1)!) with log m expanded, so tiny d cannot underflow
    log_pdf = math.log(2.0) - m + k * (math.log(density * math.pi) + 2.0 * log_d) - log_d - gammaln(k)
    out = np.where(pos, np.exp(log_pdf), 0.0)
    return out[()] if out.ndim == 0 else out


def kth_ordered_bs_distance_pdf(r, ell: int, density: float):
    """Density of the distance from a typical device to its ``ell``-th closest
    base station. Same law as :func:`kth_neighbor_distance_pdf`; kept as its
    own entry point since it parameterizes the closest-set integrands."""
    return kth_neighbor_distance_pdf(r, ell, density)


def ordered_distance_tail(radius, k: int, density: float):
    """``P(R_k > radius)``, i.e. fewer than ``k`` points in the disk."""
    m = density * math.pi * np.asarray(radius, dtype=float) ** 2
    return gammaincc(k, m)


def quantile_radius(ell: int, density: float, tail_mass: float) -> float:
    """Smallest radius ``R`` with ``P(R_ell > R) <= tail_mass``."""
    if not 0 < tail_mass <= 1:
        raise ValueError("tail_mass must lie in (0, 1]")
    if ell < 1 or density <= 0:
        raise ValueError("ell >= 1 and density > 0 required")
    if tail_mass >= 1.0:
        return 0.0
    # P(R_ell > R) = Q(ell, density*pi*R^2); bracket in the Poisson mean
    hi = max(4.0 * ell, 1.0)
    while gammaincc(ell, hi) > tail_mass:
        hi *= 2.0
    mu = brentq(lambda m: gammaincc(ell, m) - tail_mass, 0.0, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
    # nudge upward so the returned radius satisfies the bound despite rounding
    while gammaincc(ell, mu) > tail_mass:
        mu = np.nextafter(mu, np.inf)
    return math.sqrt(mu / (density * math.pi))


def interference_guard_radius(density: float, alpha: float, ratio: float = 1e-3) -> float:
    """Radius beyond which the mean interference of a PPP is below ``ratio``
    times the mean interference received from the annulus between the
    one-point radius ``1/sqrt(pi density)`` and the returned radius."""
    if alpha <= 2:
        raise ValueError("pathloss exponent must exceed 2")
    r0 = 1.0 / math.sqrt(math.pi * density)
    return r0 * ((1.0 + ratio) / ratio) ** (1.0 / (alpha - 2.0))


def default_window_radius(ell_max: int, density: float, alpha: float) -> float:
    """Simulation window: wide enough to contain the ``ell_max + 5`` closest
    points with probability ``1 - 1e-9`` and to make truncated interference
    negligible."""
    return max(quantile_radius(ell_max + 5, density, 1e-9), interference_guard_radius(density, alpha))
