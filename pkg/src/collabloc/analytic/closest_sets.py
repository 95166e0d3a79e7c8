"""Probability that two devices share their set of ``ell`` closest base
stations, for a fixed separation and for a random k-th-neighbor separation.

Everything is evaluated in units where the BS density is one: lengths are
multiplied by ``sqrt(lam)``, which leaves all probabilities unchanged. The
radial variable is truncated where the ``ell``-th closest BS distance has
tail mass ``q.truncation_tail_mass``; that mass is added to the error bound.
"""

import math

import numpy as np

from ..geometry import lune_pair_partial
from ..pointprocess import kth_neighbor_distance_pdf, quantile_radius
from .quadrature import ProbabilityEstimate, QuadratureSpec, integrate_box

__all__ = [
    "lemma1_same_lth",
    "lemma2_diff_lth",
    "theorem1_same_set",
    "corollary11_diff_set_given_d",
    "same_set_deconditioned",
    "theorem2_same_set_kth_neighbor",
    "corollary21_diff_set_kth_neighbor",
]

_TINY = 1e-300
_DEFAULT_Q = QuadratureSpec()


def _check(d, ell, lam):
    if not d >= 0:
        raise ValueError("separation must be >= 0")
    if int(ell) != ell or ell < 1:
        raise ValueError("ell must be a positive integer")
    if not lam > 0:
        raise ValueError("BS density must be > 0")


def _far_side(r, th, d):
    # distance from the BS at (r cos th, r sin th) to the device at (d, 0)
    return np.sqrt(np.maximum(r * r + d * d - 2.0 * r * d * np.cos(th), 0.0))


def _same_lth_kernel(r, th, d, ell):
    """Integrand for "same set, same ell-th BS" (unit density, no leading constant)."""
    r = np.maximum(r, _TINY)
    area = np.pi * r * r
    rb = np.maximum(_far_side(r, th, d), _TINY)
    dd = np.maximum(d, _TINY)
    # both circles pass through the ell-th closest BS, so they always meet
    lune_u, lune_v, _ = lune_pair_partial(r, rb, dd)
    shared = 1.0 - lune_u / area
    outside = lune_v
    return shared ** (ell - 1) * np.exp(-(outside + area)) * area**ell / r


def _diff_lth_kernel(r, th, psi, d, ell):
    """Integrand for "same set, different ell-th BS" over ``(r, theta, psi)``; the inner radius ``x`` runs
    over ``[|v - x_ell|, d + r]`` through ``x = a + (b - a)(1 - cos psi)/2``,
    which smooths the square-root endpoint behaviour of the arc angle."""
    r = np.maximum(r, _TINY)
    area = np.pi * r * r
    dd = np.maximum(d, _TINY)
    a = _far_side(r, th, d)
    b = d + r
    x = np.maximum(a + (b - a) * 0.5 * (1.0 - np.cos(psi)), _TINY)
    jac = (b - a) * 0.5 * np.sin(psi)
    # x >= |v - x_ell| >= |r - d| and x <= d + r: the circles always meet
    lune_u, outside, half_arc = lune_pair_partial(r, x, dd)
    shared = 1.0 - lune_u / area
    arc = 2.0 * half_arc
    return jac * shared ** (ell - 2) * np.exp(-(outside + area)) * arc * x * area**ell / (r * area)


def _lemma1_const(ell):
    return 2.0 / (math.pi * math.factorial(ell - 1))


def _lemma2_const(ell):
    return 2.0 * (ell - 1) / (math.pi * math.factorial(ell - 1))


def _r_max(ell, q):
    return quantile_radius(ell, 1.0, q.truncation_tail_mass)


def lemma1_same_lth(d, ell, lam, q: QuadratureSpec = _DEFAULT_Q) -> ProbabilityEstimate:
    """P(same ``ell`` closest BSs and same ``ell``-th closest | separation ``d``)."""
    _check(d, ell, lam)
    dn = d * math.sqrt(lam)
    c = _lemma1_const(ell)

    def f(p):
        return c * _same_lth_kernel(p[:, 0], p[:, 1], dn, ell)

    est, err = integrate_box(f, [0.0, 0.0], [_r_max(ell, q), math.pi], q)
    return ProbabilityEstimate.clamped(est, err + q.truncation_tail_mass, "quadrature",
                                       f"same ell-th closest BS, ell={ell}, d*sqrt(lam)={dn:.6g}")


def lemma2_diff_lth(d, ell, lam, q: QuadratureSpec = _DEFAULT_Q) -> ProbabilityEstimate:
    """P(same ``ell`` closest BSs but different ``ell``-th closest | ``d``)."""
    _check(d, ell, lam)
    dn = d * math.sqrt(lam)
    if ell == 1 or dn == 0:
        return ProbabilityEstimate(0.0, 0.0, "closed_form", "empty event")
    c = _lemma2_const(ell)

    def f(p):
        return c * _diff_lth_kernel(p[:, 0], p[:, 1], p[:, 2], dn, ell)

    est, err = integrate_box(f, [0.0, 0.0, 0.0], [_r_max(ell, q), math.pi, math.pi], q)
    return ProbabilityEstimate.clamped(est, err + q.truncation_tail_mass, "quadrature",
                                       f"different ell-th closest BS, ell={ell}, d*sqrt(lam)={dn:.6g}")


def theorem1_same_set(d, ell, lam, q: QuadratureSpec = _DEFAULT_Q) -> ProbabilityEstimate:
    """P(the two devices have the same ``ell`` closest BSs | separation ``d``)."""
    a = lemma1_same_lth(d, ell, lam, q)
    b = lemma2_diff_lth(d, ell, lam, q)
    return ProbabilityEstimate.clamped(a.value + b.value, a.error_bound + b.error_bound,
                                       "quadrature", f"same closest set, ell={ell}, d={d:g}")


def corollary11_diff_set_given_d(d, ell, lam, q: QuadratureSpec = _DEFAULT_Q) -> ProbabilityEstimate:
    """P(the closest sets differ | ``d``): the chance that two devices hearing
    exactly ``ell`` BSs each hear ``ell + 1`` distinct BSs together."""
    return theorem1_same_set(d, ell, lam, q).complement(f"different closest set, ell={ell}, d={d:g}")


def same_set_deconditioned(distance_pdf, y_lo, y_hi, ell, lam, q: QuadratureSpec = _DEFAULT_Q,
                           outside_mass: float = 0.0) -> ProbabilityEstimate:
    """Average of :func:`theorem1_same_set` over a separation density.

    ``distance_pdf`` is vectorized in physical length units and is integrated
    over ``[y_lo, y_hi]``; ``outside_mass`` is the probability it places
    outside that range and is added to the error bound.
    """
    _check(0.0, ell, lam)
    s = math.sqrt(lam)
    lo, hi = y_lo * s, y_hi * s
    c1, c2 = _lemma1_const(ell), _lemma2_const(ell)
    rmax = _r_max(ell, q)

    def weight(yn):
        return np.asarray(distance_pdf(yn / s), dtype=float) / s

    def f1(p):
        return c1 * weight(p[:, 0]) * _same_lth_kernel(p[:, 1], p[:, 2], p[:, 0], ell)

    est1, err1 = integrate_box(f1, [lo, 0.0, 0.0], [hi, rmax, math.pi], q)
    est2 = err2 = 0.0
    if ell >= 2:
        def f2(p):
            return c2 * weight(p[:, 0]) * _diff_lth_kernel(p[:, 1], p[:, 2], p[:, 3], p[:, 0], ell)

        est2, err2 = integrate_box(f2, [lo, 0.0, 0.0, 0.0], [hi, rmax, math.pi, math.pi], q)
    err = err1 + err2 + q.truncation_tail_mass + outside_mass
    return ProbabilityEstimate.clamped(est1 + est2, err, "quadrature",
                                       f"same closest set over separation law, ell={ell}")


def theorem2_same_set_kth_neighbor(k, ell, lam, nu, q: QuadratureSpec = _DEFAULT_Q) -> ProbabilityEstimate:
    """P(same ``ell`` closest BSs) when ``v`` is the ``k``-th nearest device of
    a PPP with density ``nu``."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    if not nu > 0:
        raise ValueError("device density must be > 0")
    tail = q.truncation_tail_mass
    y_hi = quantile_radius(int(k), nu, tail)
    est = same_set_deconditioned(lambda y: kth_neighbor_distance_pdf(y, int(k), nu),
                                 0.0, y_hi, ell, lam, q, outside_mass=tail)
    return ProbabilityEstimate(est.value, est.error_bound, "quadrature",
                               f"same closest set, ell={ell}, k={k}, nu/lam={nu / lam:.6g}")


def corollary21_diff_set_kth_neighbor(k, ell, lam, nu, q: QuadratureSpec = _DEFAULT_Q) -> ProbabilityEstimate:
    return theorem2_same_set_kth_neighbor(k, ell, lam, nu, q).complement(
        f"different closest set, ell={ell}, k={k}")
