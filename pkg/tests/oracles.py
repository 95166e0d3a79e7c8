"""Deliberately naive reference implementations used only by the tests."""

import itertools
import math

import mpmath
import numpy as np


def circle_intersection_mp(r_u, r_v, d, dps=50):
    """Intersection area of two circles in high precision (segment form)."""
    mpmath.mp.dps = dps
    r_u, r_v, d = mpmath.mpf(r_u), mpmath.mpf(r_v), mpmath.mpf(d)
    if d >= r_u + r_v:
        return mpmath.mpf(0)
    if d <= abs(r_u - r_v):
        return mpmath.pi * min(r_u, r_v) ** 2
    a = r_u**2 * mpmath.acos((d**2 + r_u**2 - r_v**2) / (2 * d * r_u))
    b = r_v**2 * mpmath.acos((d**2 + r_v**2 - r_u**2) / (2 * d * r_v))
    c = mpmath.sqrt((-d + r_u + r_v) * (d + r_u - r_v) * (d - r_u + r_v) * (d + r_u + r_v)) / 2
    return a + b - c


def arc_inside(d, r, x, n=2_000_000):
    """Angle subtended by the part of the circle of radius ``x`` around
    ``(d, 0)`` lying inside the circle of radius ``r`` at the origin,
    measured by dense sampling of the arc."""
    t = (np.arange(n) + 0.5) * (2 * np.pi / n)
    px, py = d + x * np.cos(t), x * np.sin(t)
    return 2 * np.pi * np.count_nonzero(px * px + py * py <= r * r) / n


def sinr_loop(bs_xy, bands, gains_db, dev_xy, p, alpha, noise):
    """Straight-line SINR of every link to one device."""
    n = len(bs_xy)
    rx = []
    for i in range(n):
        dist = math.hypot(bs_xy[i][0] - dev_xy[0], bs_xy[i][1] - dev_xy[1])
        rx.append(p * 10 ** (gains_db[i] / 10) * dist ** (-alpha))
    out = []
    for i in range(n):
        interf = sum(rx[j] for j in range(n) if j != i and bands[j] == bands[i])
        out.append(rx[i] / (interf + noise))
    return out


def closest_sets_loop(points, devices, ell):
    """For each device, the indices of its ``ell`` nearest points."""
    out = []
    for dx, dy in devices:
        dist = [(math.hypot(x - dx, y - dy), i) for i, (x, y) in enumerate(points)]
        dist.sort()
        out.append([i for _, i in dist[:ell]])
    return out


def laman_by_definition(n, edges):
    """Rigidity as 'some 2n-3 edges with every vertex subset spanning at
    most 2k-3 of them'; enumerates edge subsets directly."""
    need = 2 * n - 3
    if n <= 1:
        return True
    edges = list(edges)
    if len(edges) < need:
        return False
    vsets = [set(s) for k in range(2, n + 1) for s in itertools.combinations(range(n), k)]
    for sub in itertools.combinations(edges, need):
        if all(sum(1 for i, j in sub if i in vs and j in vs) <= 2 * len(vs) - 3 for vs in vsets):
            return True
    return False
