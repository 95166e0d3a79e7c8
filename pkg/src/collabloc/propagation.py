"""SINR, correlated log-normal shadowing, random band assignment and
hearability extraction for BS worlds sampled around a few devices.

Two layers share one sampling routine (:func:`draw_worlds`):

* a per-realization API (:class:`Realization`, :func:`sinr`,
  :func:`hearability_profile`, :func:`joint_profiles`) that is easy to reason
  about and is used by the tests as the reference path, and
* batched helpers (:func:`batch_received_power`, :func:`batch_sinr`,
  :func:`top_by_sinr`) that the Monte Carlo engine runs over padded
  ``(trials, points)`` arrays.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .pointprocess import PointSet, PppConfig, default_window_radius, stream, uniform_disk

__all__ = [
    "NetworkScenario",
    "Realization",
    "HearabilityProfile",
    "WorldBatch",
    "db_to_linear",
    "linear_to_db",
    "draw_worlds",
    "generate_realization",
    "received_powers",
    "sinr",
    "sinr_all",
    "hearability_profile",
    "joint_profiles",
    "batch_received_power",
    "batch_sinr",
    "top_by_sinr",
]


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def linear_to_db(x):
    return 10.0 * np.log10(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class NetworkScenario:
    """Physical parameters of one experiment point.

    ``sinr_threshold`` is linear; use :meth:`with_beta_db` / :attr:`beta_db`
    for the dB view. ``noise_power = 0`` (the default) makes the network
    interference limited and the results scale-free in ``bs_density``.
    """

    bs_density: float
    pathloss_exponent: float = 4.0
    sinr_threshold: float = 1.0
    tx_power: float = 1.0
    noise_power: float = 0.0
    shadowing_sigma_db: float = 0.0
    shadowing_correlation: float = 0.0
    reuse_factor: int = 1
    ell: int = 2
    md_density: float | None = None

    def __post_init__(self):
        if not (self.bs_density > 0 and math.isfinite(self.bs_density)):
            raise ValueError("bs_density must be finite and > 0")
        if not self.pathloss_exponent > 2:
            raise ValueError("pathloss exponent must exceed 2")
        if not self.sinr_threshold > 0:
            raise ValueError("SINR threshold must be > 0")
        if not self.tx_power > 0:
            raise ValueError("tx_power must be > 0")
        if self.noise_power < 0:
            raise ValueError("noise_power must be >= 0")
        if self.shadowing_sigma_db < 0:
            raise ValueError("shadowing sigma must be >= 0")
        if not 0.0 <= self.shadowing_correlation <= 1.0:
            raise ValueError("shadowing correlation must lie in [0, 1]")
        if int(self.reuse_factor) != self.reuse_factor or self.reuse_factor < 1:
            raise ValueError("reuse_factor must be a positive integer")
        if int(self.ell) != self.ell or self.ell < 1:
            raise ValueError("ell must be a positive integer")
        if self.md_density is not None and not self.md_density > 0:
            raise ValueError("md_density must be > 0 when given")

    @property
    def beta_db(self) -> float:
        return float(linear_to_db(self.sinr_threshold))

    def with_beta_db(self, beta_db: float) -> "NetworkScenario":
        return replace(self, sinr_threshold=float(db_to_linear(beta_db)))

    @property
    def shadowed(self) -> bool:
        return self.shadowing_sigma_db > 0

    @property
    def min_distance(self) -> float:
        return 1e-9 / math.sqrt(self.bs_density)

    def window_radius(self, reach: float = 0.0) -> float:
        """Default simulation window for devices within ``reach`` of the
        origin."""
        return default_window_radius(self.ell + 1, self.bs_density, self.pathloss_exponent) + reach


@dataclass
class WorldBatch:
    """Padded arrays for ``T`` independent BS worlds on a disk window.

    Entry ``[t, m]`` is meaningful only where ``m < counts[t]``; padding has
    ``valid == False``. ``private`` is ``None`` without shadowing, else has
    shape ``(T, M, n_devices)``.
    """

    counts: np.ndarray
    x: np.ndarray
    y: np.ndarray
    band: np.ndarray | None
    common: np.ndarray | None
    private: np.ndarray | None
    window_radius: float

    @property
    def valid(self) -> np.ndarray:
        return np.arange(self.x.shape[1])[None, :] < self.counts[:, None]


def draw_worlds(rng: np.random.Generator, scen: NetworkScenario, n_trials: int,
                n_devices: int, window_radius: float) -> WorldBatch:
    """Sample ``n_trials`` BS worlds (positions, bands, shadowing draws)."""
    mean = scen.bs_density * math.pi * window_radius**2
    PppConfig(scen.bs_density, window_radius)  # validates the guard
    counts = rng.poisson(mean, n_trials)
    m = int(counts.max()) if n_trials else 0
    x, y = uniform_disk(rng, (n_trials, m), window_radius)
    band = rng.integers(0, scen.reuse_factor, (n_trials, m)) if scen.reuse_factor > 1 else None
    common = private = None
    if scen.shadowed:
        common = rng.standard_normal((n_trials, m))
        private = rng.standard_normal((n_trials, m, n_devices))
    return WorldBatch(counts, x, y, band, common, private, window_radius)


def shadow_gain_db(scen: NetworkScenario, common, private):
    """Shadowing in dB; two devices' gains from one BS have correlation
    exactly ``shadowing_correlation``."""
    rho = scen.shadowing_correlation
    return scen.shadowing_sigma_db * (math.sqrt(rho) * common + math.sqrt(1.0 - rho) * private)


def batch_received_power(world: WorldBatch, px: float, py: float, scen: NetworkScenario,
                         device_index: int = 0) -> np.ndarray:
    """Received power at ``(px, py)`` from every BS, zero on padding."""
    d2 = (world.x - px) ** 2 + (world.y - py) ** 2
    np.maximum(d2, scen.min_distance**2, out=d2)
    a = scen.pathloss_exponent
    if a == 4.0:
        p = 1.0 / (d2 * d2)
    else:
        p = d2 ** (-0.5 * a)
    if scen.tx_power != 1.0:
        p *= scen.tx_power
    if scen.shadowed:
        p *= 10.0 ** (shadow_gain_db(scen, world.common, world.private[:, :, device_index]) / 10.0)
    p[~world.valid] = 0.0
    return p


def batch_sinr(power: np.ndarray, band: np.ndarray | None, scen: NetworkScenario) -> np.ndarray:
    """SINR of every BS link given received powers; interference is summed
    over the BSs sharing the link's band."""
    if band is None:
        total = power.sum(axis=1, keepdims=True)
    else:
        total = np.zeros_like(power)
        for k in range(scen.reuse_factor):
            on_k = band == k
            tk = np.where(on_k, power, 0.0).sum(axis=1, keepdims=True)
            total += np.where(on_k, tk, 0.0)
    interference = total - power
    np.maximum(interference, 0.0, out=interference)
    denom = interference + scen.noise_power
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(power > 0, power / denom, 0.0)
    return out


def top_by_sinr(values: np.ndarray, m: int):
    """The ``m`` largest entries per row, sorted decreasingly, with ties
    broken by the lower column index. Returns ``(values, indices)``."""
    t, n = values.shape
    m = min(m, n)
    if m == 0:
        return np.zeros((t, 0)), np.zeros((t, 0), dtype=np.int64)
    if m < n:
        part = np.argpartition(-values, m - 1, axis=1)[:, :m]
    else:
        part = np.broadcast_to(np.arange(n), (t, n)).copy()
    vals = np.take_along_axis(values, part, axis=1)
    order = np.lexsort((part, -vals), axis=1)
    idx = np.take_along_axis(part, order, axis=1)
    return np.take_along_axis(values, idx, axis=1), idx


@dataclass(frozen=True, eq=False)
class Realization:
    """One sampled world: BS positions, band labels, shadowing draws and the
    devices it serves (``device_positions[0]`` is ``u``)."""

    bs_points: PointSet
    band_labels: np.ndarray = field(repr=False)
    shadow_common: np.ndarray = field(repr=False)
    shadow_private: np.ndarray = field(repr=False)
    device_positions: np.ndarray

    @property
    def n_bs(self) -> int:
        return len(self.bs_points)

    @classmethod
    def from_batch(cls, world: WorldBatch, t: int, device_positions, scen: NetworkScenario,
                   seed: int = -1) -> "Realization":
        n = int(world.counts[t])
        pts = np.column_stack((world.x[t, :n], world.y[t, :n]))
        dev = np.asarray(device_positions, dtype=float).reshape(-1, 2)
        bands = world.band[t, :n].copy() if world.band is not None else np.zeros(n, dtype=np.int64)
        if world.common is not None:
            common = world.common[t, :n].copy()
            private = world.private[t, :n, :].copy()
        else:
            common = np.zeros(n)
            private = np.zeros((n, len(dev)))
        ps = PointSet(pts, seed, PppConfig(scen.bs_density, world.window_radius))
        return cls(ps, bands, common, private, dev)


def generate_realization(scen: NetworkScenario, device_positions, seed: int,
                         window_radius: float | None = None) -> Realization:
    dev = np.asarray(device_positions, dtype=float).reshape(-1, 2)
    if window_radius is None:
        window_radius = scen.window_radius(float(np.max(np.hypot(dev[:, 0], dev[:, 1]))))
    world = draw_worlds(stream(seed), scen, 1, len(dev), window_radius)
    return Realization.from_batch(world, 0, dev, scen, seed)


def received_powers(real: Realization, scen: NetworkScenario, device: int) -> np.ndarray:
    """``P * F * dist^-alpha`` from every BS to device number ``device``."""
    px, py = real.device_positions[device]
    pts = real.bs_points.points
    dist = np.maximum(np.hypot(pts[:, 0] - px, pts[:, 1] - py), scen.min_distance)
    gain = np.ones(real.n_bs)
    if scen.shadowed:
        gain = 10.0 ** (shadow_gain_db(scen, real.shadow_common, real.shadow_private[:, device]) / 10.0)
    return scen.tx_power * gain * dist ** (-scen.pathloss_exponent)


def sinr_all(real: Realization, scen: NetworkScenario, device: int) -> np.ndarray:
    p = received_powers(real, scen, device)
    if real.n_bs == 0:
        return p
    bands = real.band_labels
    totals = np.bincount(bands, weights=p, minlength=scen.reuse_factor)
    interference = np.maximum(totals[bands] - p, 0.0)
    return p / (interference + scen.noise_power)


def sinr(bs: int, device: int, real: Realization, scen: NetworkScenario) -> float:
    """SINR of the link from BS ``bs`` to device number ``device``; only BSs
    on the same band interfere."""
    if not 0 <= bs < real.n_bs:
        raise IndexError(f"BS index {bs} out of range")
    return float(sinr_all(real, scen, device)[bs])


@dataclass(frozen=True)
class HearabilityProfile:
    device_id: int
    hearable_count: int
    strongest_set: tuple
    per_bs_sinr: tuple = field(repr=False)

    @property
    def hearable_set(self) -> frozenset:
        return frozenset(i for i, _ in self.per_bs_sinr[: self.hearable_count])


def hearability_profile(device: int, real: Realization, scen: NetworkScenario) -> HearabilityProfile:
    """Hearable-BS count (summed over bands) and the ``ell`` strongest BSs."""
    s = sinr_all(real, scen, device)
    order = np.lexsort((np.arange(len(s)), -s))
    count = int(np.count_nonzero(s >= scen.sinr_threshold))
    strongest = tuple(int(i) for i in order[: min(scen.ell, len(s))])
    per_bs = tuple((int(i), float(s[i])) for i in order)
    return HearabilityProfile(device, count, strongest, per_bs)


def joint_profiles(d: float, real_seed: int, scen: NetworkScenario):
    """Profiles of ``u`` at the origin and ``v`` at ``(d, 0)`` in one shared
    world."""
    if d < 0:
        raise ValueError("separation must be >= 0")
    real = generate_realization(scen, [(0.0, 0.0), (d, 0.0)], real_seed)
    return hearability_profile(0, real, scen), hearability_profile(1, real, scen)
