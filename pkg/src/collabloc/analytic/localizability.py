"""Combining hearability distributions with the closest-set probability into
localizability probabilities, without and with collaboration."""

from dataclasses import dataclass
import math
from typing import NamedTuple, Protocol

import numpy as np

from .quadrature import ProbabilityEstimate

__all__ = [
    "HearabilityPmf",
    "HearabilityProvider",
    "ReuseLocalizability",
    "p_loc_noncollab",
    "p_loc_collab_noshadow",
    "p_loc_collab_shadow",
    "p_loc_reuse",
]

SUPPORT_CUT = 1e-6


@dataclass(frozen=True, eq=False)
class HearabilityPmf:
    """Distribution of the number of hearable BSs.

    ``pmf[n]`` is ``P(N = n)`` on the explicit support ``0 .. len(pmf) - 1``;
    ``tail_mass`` is the probability of anything larger. ``trials`` is the
    Monte Carlo sample size behind the estimate, or ``None`` for exact input.
    """

    pmf: np.ndarray
    tail_mass: float = 0.0
    source: str = "monte_carlo"
    trials: int | None = None

    SOURCES = ("monte_carlo", "external_plugin")

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        object.__setattr__(self, "pmf", p)
        if self.source not in self.SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if p.ndim != 1 or np.any(p < 0) or self.tail_mass < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() + self.tail_mass - 1.0) > 1e-6:
            raise ValueError(f"pmf sums to {p.sum() + self.tail_mass}, expected 1")

    @classmethod
    def from_counts(cls, counts, source="monte_carlo") -> "HearabilityPmf":
        """Empirical pmf from a histogram ``counts[n]``; the support is cut
        where the cumulative mass first reaches ``1 - 1e-6``."""
        counts = np.asarray(counts, dtype=float)
        total = counts.sum()
        if total <= 0:
            raise ValueError("no samples")
        p = counts / total
        cum = np.cumsum(p)
        last = int(np.searchsorted(cum, 1.0 - SUPPORT_CUT)) if len(p) else 0
        last = min(last, len(p) - 1)
        kept = p[: last + 1]
        return cls(kept, max(0.0, 1.0 - kept.sum()), source, int(total))

    @classmethod
    def point_mass(cls, n: int) -> "HearabilityPmf":
        p = np.zeros(n + 1)
        p[n] = 1.0
        return cls(p, 0.0, "external_plugin", None)

    def eq(self, n: int) -> float:
        return float(self.pmf[n]) if 0 <= n < len(self.pmf) else 0.0

    def ge(self, n: int) -> float:
        n = max(n, 0)
        return float(self.pmf[n:].sum() + self.tail_mass)

    def error(self, p: float) -> float:
        """Three-standard-error band of a probability read off this pmf."""
        if self.trials is None:
            return 0.0
        return 3.0 * math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)


class HearabilityProvider(Protocol):
    """Anything mapping a scenario to the marginal hearable-count pmf."""

    def __call__(self, scen) -> HearabilityPmf: ...


def _method(*pmfs):
    return "monte_carlo" if any(p.trials is not None for p in pmfs) else "closed_form"


def p_loc_noncollab(hear_u: HearabilityPmf, ell: int) -> ProbabilityEstimate:
    """``P(N_u >= ell + 1)``."""
    v = hear_u.ge(ell + 1)
    return ProbabilityEstimate.clamped(v, hear_u.error(v), _method(hear_u),
                                       f"P(N_u >= {ell + 1})")


def p_loc_collab_noshadow(hear_u: HearabilityPmf, hear_v: HearabilityPmf,
                          p_diff_set: ProbabilityEstimate, ell: int) -> ProbabilityEstimate:
    """``P(N_u >= ell+1) + P(N_u = ell) P(N_v >= ell) P(closest sets differ)``;
    the two devices' counts are treated as independent given different
    closest sets."""
    a = hear_u.ge(ell + 1)
    b = hear_u.eq(ell)
    c = hear_v.ge(ell)
    p = float(p_diff_set.value)
    value = a + b * c * p
    err = (hear_u.error(a) + hear_u.error(b) * c * p + b * hear_v.error(c) * p
           + b * c * p_diff_set.error_bound)
    return ProbabilityEstimate.clamped(value, err, _method(hear_u, hear_v),
                                       f"collaborative, ell={ell}, P(diff set)={p:.6g}")


def p_loc_collab_shadow(hear_u: HearabilityPmf, hear_v: HearabilityPmf, ell: int) -> ProbabilityEstimate:
    """Shadowing approximation: the strongest sets are taken to always
    differ, giving ``P(N_u >= ell+1) + P(N_u = ell) P(N_v >= ell)``."""
    one = ProbabilityEstimate(1.0, 0.0, "closed_form", "sets assumed to differ")
    return p_loc_collab_noshadow(hear_u, hear_v, one, ell)


class ReuseLocalizability(NamedTuple):
    noncollab: ProbabilityEstimate
    collab: ProbabilityEstimate


def p_loc_reuse(hear_u_k: HearabilityPmf, hear_v_k: HearabilityPmf, ell: int) -> ReuseLocalizability:
    """Localizability with random frequency reuse; the pmfs are of the
    hearable counts summed over all bands."""
    return ReuseLocalizability(p_loc_noncollab(hear_u_k, ell),
                               p_loc_collab_shadow(hear_u_k, hear_v_k, ell))
