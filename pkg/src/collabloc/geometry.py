"""Planar circle geometry: lune and lens areas, and the arc angle of one
circle lying inside another.

All functions accept scalars or numpy arrays (broadcast together) and are
dimensionless; any consistent length unit works.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "CirclePair",
    "lune_area",
    "intersection_area",
    "intersection_area_reference",
    "phi_range",
    "lune_pair_partial",
    "GeometryDomainError",
]


class GeometryDomainError(ValueError):
    """Raised for radii/separations outside the valid domain."""


@dataclass(frozen=True)
class CirclePair:
    """Two circles of radii ``r_u`` and ``r_v`` whose centers are ``d`` apart."""

    r_u: float
    r_v: float
    d: float

    def __post_init__(self):
        _check(self.r_u, self.r_v, self.d)

    @property
    def regime(self) -> str:
        """One of ``"disjoint"``, ``"contained"`` or ``"partial"``."""
        if self.d >= self.r_u + self.r_v:
            return "disjoint"
        if self.d <= abs(self.r_u - self.r_v):
            return "contained"
        return "partial"


def _check(r_u, r_v, d):
    r_u = np.asarray(r_u, dtype=float)
    r_v = np.asarray(r_v, dtype=float)
    d = np.asarray(d, dtype=float)
    if not (np.all(np.isfinite(r_u)) and np.all(np.isfinite(r_v)) and np.all(np.isfinite(d))):
        raise GeometryDomainError("radii and separation must be finite")
    if np.any(r_u <= 0) or np.any(r_v <= 0):
        raise GeometryDomainError("radii must be strictly positive")
    if np.any(d < 0):
        raise GeometryDomainError("separation must be non-negative")
    return r_u, r_v, d


def _unpack(p_or_ru, r_v, d):
    if isinstance(p_or_ru, CirclePair):
        return p_or_ru.r_u, p_or_ru.r_v, p_or_ru.d
    return p_or_ru, r_v, d


def _arcsec(num, den, sine_num=None):
    # sec^-1(num/den) on the principal branch [0, pi], i.e. arccos(den/num).
    # With the matching sine numerator (den^2 + sine_num^2 = num^2) atan2 is
    # used instead; arccos loses half the digits near +-1.
    if sine_num is not None:
        # coincident circles (d -> 0, equal radii): both sides at the limit pi/2
        return np.where((sine_num == 0) & (den == 0), 0.5 * np.pi, np.arctan2(sine_num, den))
    return np.arccos(np.clip(den / num, -1.0, 1.0))


def _lens_terms(r_u, r_v, d):
    # half the square-root term plus the two inverse secants; radius
    # differences are formed first so nearly equal circles keep their digits
    diff = r_u - r_v
    prod = (r_u + r_v + d) * (d - diff) * (d + diff) * (r_u + r_v - d)
    root = 0.5 * np.sqrt(np.maximum(prod, 0.0))
    sec_u = _arcsec(2.0 * d * r_u, -diff * (r_u + r_v) - d**2, 2.0 * root)
    sec_v = _arcsec(2.0 * d * r_v, d**2 - diff * (r_u + r_v), 2.0 * root)
    return root, sec_u, sec_v


def _lune_partial(r_u, r_v, d):
    """Closed form for partially overlapping circles (square root plus two
    inverse secants). Only meaningful where |r_u - r_v| < d < r_u + r_v."""
    root, sec_u, sec_v = _lens_terms(r_u, r_v, d)
    return root + r_u**2 * sec_u - r_v**2 * sec_v


def lune_area(p_or_ru, r_v=None, d=None, *, check=True):
    """Area of the circle of radius ``r_u`` lying outside the circle of radius
    ``r_v``, centers ``d`` apart.

    Accepts either a :class:`CirclePair` or the three values (scalars or
    arrays). Degenerate configurations are resolved before the closed form is
    used: disjoint circles give ``pi r_u^2``; ``u`` inside ``v`` gives 0;
    ``v`` inside ``u`` gives ``pi (r_u^2 - r_v^2)``.
    """
    r_u, r_v, d = _unpack(p_or_ru, r_v, d)
    if check:
        r_u, r_v, d = _check(r_u, r_v, d)
    else:
        r_u, r_v, d = (np.asarray(a, dtype=float) for a in (r_u, r_v, d))
    r_u, r_v, d = np.broadcast_arrays(r_u, r_v, d)

    disjoint = d >= r_u + r_v
    contained = d <= np.abs(r_u - r_v)
    partial = ~(disjoint | contained)

    out = np.empty(r_u.shape, dtype=float)
    out[disjoint] = np.pi * r_u[disjoint] ** 2
    c_u, c_v = r_u[contained], r_v[contained]
    out[contained] = np.where(c_u <= c_v, 0.0, np.pi * (c_u**2 - c_v**2))
    if np.any(partial):
        out[partial] = _lune_partial(r_u[partial], r_v[partial], d[partial])
    # clamp rounding drift into the admissible range
    out = np.clip(out, np.maximum(np.pi * (r_u**2 - r_v**2), 0.0), np.pi * r_u**2)
    return out[()] if out.ndim == 0 else out


def intersection_area(p_or_ru, r_v=None, d=None, *, check=True):
    """Area of the lens shared by the two circles, ``pi r_u^2 - lune_area``."""
    r_u, r_v, d = _unpack(p_or_ru, r_v, d)
    r_u_arr = np.asarray(r_u, dtype=float)
    return np.pi * r_u_arr**2 - lune_area(r_u, r_v, d, check=check)


def intersection_area_reference(r_u, r_v, d):
    """Textbook lens area from the two circular segments (arccos form).

    Written independently of :func:`lune_area` and used to cross-check it.
    """
    r_u, r_v, d = (float(a) for a in (r_u, r_v, d))
    if d >= r_u + r_v:
        return 0.0
    if d <= abs(r_u - r_v):
        return np.pi * min(r_u, r_v) ** 2
    a_u = np.arccos(np.clip((d * d + r_u * r_u - r_v * r_v) / (2 * d * r_u), -1, 1))
    a_v = np.arccos(np.clip((d * d + r_v * r_v - r_u * r_u) / (2 * d * r_v), -1, 1))
    seg_u = r_u * r_u * (a_u - 0.5 * np.sin(2 * a_u))
    seg_v = r_v * r_v * (a_v - 0.5 * np.sin(2 * a_v))
    return seg_u + seg_v


def phi_range(d, r, x, *, check=True):
    """Angle (radians) subtended at ``v`` by the arc of the radius-``x`` circle
    around ``v`` that lies inside the radius-``r`` circle around ``u``, where
    ``u`` and ``v`` are ``d`` apart.

    Equals ``2 arccos((d^2 + x^2 - r^2) / (2 d x))``. The arccos argument is
    clamped to [-1, 1] to absorb rounding; configurations whose circles do not
    meet raise :class:`GeometryDomainError` when ``check`` is set.
    """
    d, r, x = (np.asarray(a, dtype=float) for a in (d, r, x))
    if check:
        if np.any(d <= 0) or np.any(r <= 0) or np.any(x <= 0):
            raise GeometryDomainError("phi_range needs positive lengths")
        tol = 1e-12 * np.maximum(np.maximum(d, r), x)
        if np.any(np.abs(d - x) > r + tol) or np.any(r > d + x + tol):
            raise GeometryDomainError("circles do not intersect")
    arg = np.clip((d * d + x * x - r * r) / (2.0 * d * x), -1.0, 1.0)
    out = 2.0 * np.arccos(arg)
    return out[()] if out.ndim == 0 else out


def lune_pair_partial(r_u, r_v, d):
    """Both lunes of two circles known to intersect (partially overlapping
    or tangent), evaluated with one shared square-root term.

    Returns ``(lune_area(r_u, r_v, d), lune_area(r_v, r_u, d), half_arc_v)``
    where ``half_arc_v`` is half of :func:`phi_range` ``(d, r_u, r_v)``. No
    regime checks are made; inputs must be arrays of valid, intersecting
    configurations.
    """
    root, sec_u, sec_v = _lens_terms(r_u, r_v, d)
    lune_u = root + r_u**2 * sec_u - r_v**2 * sec_v
    # swapping the roles of the circles: sec_u -> pi - sec_v', etc.
    lune_v = root + r_v**2 * (np.pi - sec_v) - r_u**2 * (np.pi - sec_u)
    area_u, area_v = np.pi * r_u**2, np.pi * r_v**2
    lune_u = np.clip(lune_u, np.maximum(area_u - area_v, 0.0), area_u)
    lune_v = np.clip(lune_v, np.maximum(area_v - area_u, 0.0), area_v)
    return lune_u, lune_v, sec_v
