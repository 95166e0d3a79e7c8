"""Monte Carlo ground truth on sampled PPP worlds.

Trials are processed in fixed-size chunks. Chunk ``c`` draws from the
stream ``(master_seed, engine, c)``, so results depend only on
``(master_seed, chunk_size, trials)`` and never on scheduling or thread
count. Per-chunk tallies are integers summed in chunk order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math

import numpy as np
from scipy.stats import binomtest

from ..pointprocess import quantile_radius, stream, uniform_disk
from ..propagation import (
    NetworkScenario,
    batch_received_power,
    batch_sinr,
    db_to_linear,
    draw_worlds,
    top_by_sinr,
)
from ..rigidity import device_localizable
from .localizability import HearabilityPmf
from .quadrature import ProbabilityEstimate

__all__ = [
    "Rate",
    "MonteCarloConfigError",
    "HearabilitySweep",
    "JointRates",
    "ClosestSetSweep",
    "simulate_hearability",
    "mc_hearability_pmf",
    "MonteCarloHearability",
    "simulate_closest_sets",
    "simulate_kth_neighbor_sets",
]

ENGINE_HEARABILITY = 1
ENGINE_CLOSEST = 2
ENGINE_KTH_NEIGHBOR = 3

DEFAULT_CHUNK = 256
TOP_M = 64          # SINR-ranked BSs kept per device and trial
MAX_COUNT = 128     # histogram support of hearable counts
GEOMETRIC_TAIL = 1e-12


class MonteCarloConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Rate:
    """A binomial proportion ``successes / trials``."""

    successes: int
    trials: int

    @property
    def value(self) -> float:
        return self.successes / self.trials if self.trials else float("nan")

    @property
    def se(self) -> float:
        if not self.trials:
            return float("nan")
        p = self.value
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.trials)

    def wilson(self, confidence: float = 0.95):
        ci = binomtest(int(self.successes), int(self.trials)).proportion_ci(confidence, method="wilson")
        return float(ci.low), float(ci.high)

    def estimate(self, detail: str = "") -> ProbabilityEstimate:
        return ProbabilityEstimate(self.value, 3.0 * self.se, "monte_carlo",
                                   detail or f"{self.successes}/{self.trials}")


def _chunks(trials, chunk_size):
    if trials <= 0:
        raise MonteCarloConfigError("trials must be a positive integer")
    if chunk_size <= 0:
        raise MonteCarloConfigError("chunk_size must be positive")
    n_full, rest = divmod(int(trials), int(chunk_size))
    sizes = [chunk_size] * n_full + ([rest] if rest else [])
    return list(enumerate(sizes))


def _run_chunks(fn, chunks, threads):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: fn(*c), chunks))
    else:
        parts = [fn(*c) for c in chunks]
    total = {k: np.zeros_like(v) for k, v in parts[0].items()}
    for part in parts:
        for k, v in part.items():
            total[k] += v
    return total


# -- hearability -----------------------------------------------------------------

def _hearable_counts(s, top_vals, betas):
    counts = (top_vals[:, :, None] >= betas[None, None, :]).sum(axis=1)
    if top_vals.shape[1] == TOP_M:
        full = top_vals[:, -1] >= betas.min()
        if np.any(full):
            counts[full] = (s[full][:, :, None] >= betas[None, None, :]).sum(axis=1)
    return counts


def _hearability_chunk(scen, seps, betas, ells, window, master_seed, chunk_index, n):
    rng = stream(master_seed, ENGINE_HEARABILITY, chunk_index)
    world = draw_worlds(rng, scen, n, 1 + len(seps), window)
    nb, nd, nl = len(betas), len(seps), len(ells)
    lmax = max(ells)
    out = {
        "hist_u": np.zeros((nb, MAX_COUNT + 1), dtype=np.int64),
        "hist_v": np.zeros((nd, nb, MAX_COUNT + 1), dtype=np.int64),
        "collab": np.zeros((nd, nb, nl), dtype=np.int64),
        "noncollab": np.zeros((nb, nl), dtype=np.int64),
        "same_set": np.zeros((nd, nl), dtype=np.int64),
        "decay": np.zeros((nd, nb, nl, 4), dtype=np.int64),
    }

    def per_device(px, col):
        s = batch_sinr(batch_received_power(world, px, 0.0, scen, col), world.band, scen)
        tv, ti = top_by_sinr(s, TOP_M)
        c = _hearable_counts(s, tv, betas)
        if c.max(initial=0) > MAX_COUNT:
            raise RuntimeError("hearable count exceeds histogram support")
        return s, ti, c

    _, top_u, n_u = per_device(0.0, 0)
    for b in range(nb):
        out["hist_u"][b] = np.bincount(n_u[:, b], minlength=MAX_COUNT + 1)
    for li, ell in enumerate(ells):
        out["noncollab"][:, li] = (n_u >= ell + 1).sum(axis=0)
    sorted_u = {ell: np.sort(top_u[:, :ell], axis=1) for ell in ells}
    rows = np.arange(n)[:, None]
    for j, d in enumerate(seps):
        s_v, top_v, n_v = per_device(float(d), j + 1)
        for b in range(nb):
            out["hist_v"][j, b] = np.bincount(n_v[:, b], minlength=MAX_COUNT + 1)
        for li, ell in enumerate(ells):
            same = np.all(sorted_u[ell] == np.sort(top_v[:, :ell], axis=1), axis=1)
            out["same_set"][j, li] = same.sum()
            # u's ell strongest BSs that v also hears, for every threshold
            heard_by_v = s_v[rows, top_u[:, :ell]][:, :, None] >= betas[None, None, :]
            unique = n_v + (~heard_by_v).sum(axis=1)
            ok = device_localizable(n_u, n_v, unique, True, ell)
            out["collab"][j, :, li] = ok.sum(axis=0)
            for k in range(4):
                hit = (n_u == ell) & (n_v == ell + k) & same[:, None]
                out["decay"][j, :, li, k] = hit.sum(axis=0)
    return out


@dataclass
class HearabilitySweep:
    """Tallies of one hearability run over threshold and separation grids."""

    scenario: NetworkScenario
    separations: tuple
    betas_db: tuple
    ells: tuple
    trials: int
    master_seed: int
    hist_u: np.ndarray = field(repr=False)
    hist_v: np.ndarray = field(repr=False)
    collab: np.ndarray = field(repr=False)
    noncollab: np.ndarray = field(repr=False)
    same_set: np.ndarray = field(repr=False)
    decay: np.ndarray = field(repr=False)

    def beta_index(self, beta_db: float) -> int:
        for i, b in enumerate(self.betas_db):
            if abs(b - beta_db) < 1e-9:
                return i
        raise KeyError(beta_db)

    def sep_index(self, d: float) -> int:
        for i, s in enumerate(self.separations):
            if abs(s - d) < 1e-9:
                return i
        raise KeyError(d)

    def ell_index(self, ell: int) -> int:
        return self.ells.index(ell)

    def pmf_u(self, beta_db) -> HearabilityPmf:
        return HearabilityPmf.from_counts(self.hist_u[self.beta_index(beta_db)])

    def pmf_v(self, d, beta_db) -> HearabilityPmf:
        return HearabilityPmf.from_counts(self.hist_v[self.sep_index(d), self.beta_index(beta_db)])

    def noncollab_rate(self, beta_db, ell) -> Rate:
        return Rate(int(self.noncollab[self.beta_index(beta_db), self.ell_index(ell)]), self.trials)

    def collab_rate(self, d, beta_db, ell) -> Rate:
        """Monte Carlo truth of collaborative localizability of ``u``."""
        return Rate(int(self.collab[self.sep_index(d), self.beta_index(beta_db), self.ell_index(ell)]),
                    self.trials)

    def same_set_rate(self, d, ell) -> Rate:
        """Rate at which the ``ell`` strongest BSs (by SINR) coincide."""
        return Rate(int(self.same_set[self.sep_index(d), self.ell_index(ell)]), self.trials)

    def diff_set_rate(self, d, ell) -> Rate:
        r = self.same_set_rate(d, ell)
        return Rate(r.trials - r.successes, r.trials)

    def decay_rate(self, d, beta_db, ell, k) -> Rate:
        """``P(N_u = ell, N_v = ell + k | same strongest sets)``."""
        same = int(self.same_set[self.sep_index(d), self.ell_index(ell)])
        hits = int(self.decay[self.sep_index(d), self.beta_index(beta_db), self.ell_index(ell), k])
        return Rate(hits, same)


def simulate_hearability(scen: NetworkScenario, separations, betas_db, trials: int,
                         master_seed: int, ells=None, threads: int = 1,
                         chunk_size: int = DEFAULT_CHUNK, window_radius: float | None = None
                         ) -> HearabilitySweep:
    """Joint hearability of ``u`` at the origin and collaborators at
    ``(d, 0)`` for every ``d`` in ``separations``, sharing each sampled world
    across all thresholds and separations."""
    seps = tuple(float(d) for d in separations)
    betas_db = tuple(float(b) for b in betas_db)
    if not betas_db:
        raise MonteCarloConfigError("need at least one threshold")
    ells = tuple(int(e) for e in (ells or (scen.ell,)))
    if window_radius is None:
        window_radius = scen.window_radius(max(seps, default=0.0))
    betas = np.asarray(db_to_linear(betas_db), dtype=float).reshape(-1)

    def fn(ci, n):
        return _hearability_chunk(scen, seps, betas, ells, window_radius, master_seed, ci, n)

    tot = _run_chunks(fn, _chunks(trials, chunk_size), threads)
    return HearabilitySweep(scen, seps, betas_db, ells, int(trials), int(master_seed), **tot)


@dataclass(frozen=True)
class JointRates:
    noncollab: Rate
    collab_truth: Rate
    same_set: Rate
    diff_set: Rate
    decay: dict

    def wilson(self, name: str, confidence: float = 0.95):
        return getattr(self, name).wilson(confidence)


def mc_hearability_pmf(scen: NetworkScenario, device_sep: float, trials: int, master_seed: int,
                       threads: int = 1, chunk_size: int = DEFAULT_CHUNK):
    """Marginal hearable-count pmfs of ``u`` and ``v`` (``device_sep`` apart)
    at ``scen``'s threshold, plus the joint event rates: noncollaborative and
    true collaborative localizability, strongest-set agreement, and
    ``P(N_u = ell, N_v = ell + k | same set)`` for ``k = 0..3``."""
    sweep = simulate_hearability(scen, [device_sep], [scen.beta_db], trials, master_seed,
                                 threads=threads, chunk_size=chunk_size)
    b, d, ell = scen.beta_db, float(device_sep), scen.ell
    rates = JointRates(
        noncollab=sweep.noncollab_rate(b, ell),
        collab_truth=sweep.collab_rate(d, b, ell),
        same_set=sweep.same_set_rate(d, ell),
        diff_set=sweep.diff_set_rate(d, ell),
        decay={k: sweep.decay_rate(d, b, ell, k) for k in range(4)},
    )
    return sweep.pmf_u(b), sweep.pmf_v(d, b), rates


class MonteCarloHearability:
    """Default hearability provider: the simulated pmf of ``N_u`` at the
    scenario's threshold. Results are cached per scenario."""

    def __init__(self, trials: int = 100_000, master_seed: int = 1, threads: int = 1):
        self.trials = trials
        self.master_seed = master_seed
        self.threads = threads
        self._cache = {}

    def __call__(self, scen: NetworkScenario) -> HearabilityPmf:
        if scen not in self._cache:
            pmf, _, _ = mc_hearability_pmf(scen, 0.0, self.trials, self.master_seed, self.threads)
            self._cache[scen] = pmf
        return self._cache[scen]


# -- geometric closest-set classification -------------------------------------------------

def _closest(px, py, x, y, valid, k):
    # indices of the k nearest points (ties: lower index)
    key = -((x - px) ** 2 + (y - py) ** 2)
    key[~valid] = -np.inf
    return top_by_sinr(key, k)[1]


def _classify(top_u, top_v, ells, out_same_lth, out_diff_lth, j):
    for li, ell in enumerate(ells):
        same = np.all(np.sort(top_u[:, :ell], axis=1) == np.sort(top_v[:, :ell], axis=1), axis=1)
        same_lth = top_u[:, ell - 1] == top_v[:, ell - 1]
        out_same_lth[j, li] += np.count_nonzero(same & same_lth)
        out_diff_lth[j, li] += np.count_nonzero(same & ~same_lth)


def _closest_chunk(lam, seps, ells, window, master_seed, chunk_index, n):
    rng = stream(master_seed, ENGINE_CLOSEST, chunk_index)
    counts = rng.poisson(lam * math.pi * window**2, n)
    m = int(counts.max())
    x, y = uniform_disk(rng, (n, m), window)
    valid = np.arange(m)[None, :] < counts[:, None]
    if np.any(counts < max(ells)):
        raise RuntimeError("window holds too few points; enlarge it")
    lmax = max(ells)
    top_u = _closest(0.0, 0.0, x, y, valid, lmax)
    same_lth = np.zeros((len(seps), len(ells)), dtype=np.int64)
    diff_lth = np.zeros_like(same_lth)
    for j, d in enumerate(seps):
        _classify(top_u, _closest(d, 0.0, x, y, valid, lmax), ells, same_lth, diff_lth, j)
    return {"same_lth": same_lth, "diff_lth": diff_lth}


@dataclass
class ClosestSetSweep:
    separations: tuple
    ells: tuple
    trials: int
    same_lth: np.ndarray = field(repr=False)
    diff_lth: np.ndarray = field(repr=False)

    def _idx(self, d, ell):
        return self.separations.index(float(d)), self.ells.index(int(ell))

    def same_lth_rate(self, d, ell) -> Rate:
        j, li = self._idx(d, ell)
        return Rate(int(self.same_lth[j, li]), self.trials)

    def diff_lth_rate(self, d, ell) -> Rate:
        j, li = self._idx(d, ell)
        return Rate(int(self.diff_lth[j, li]), self.trials)

    def same_set_rate(self, d, ell) -> Rate:
        j, li = self._idx(d, ell)
        return Rate(int(self.same_lth[j, li] + self.diff_lth[j, li]), self.trials)


def simulate_closest_sets(lam: float, separations, ells, trials: int, master_seed: int,
                          threads: int = 1, chunk_size: int = 4096) -> ClosestSetSweep:
    """Classify, per sampled BS world, whether ``u`` (origin) and ``v`` at
    ``(d, 0)`` share their ``ell`` closest BSs, and whether they also share
    the ``ell``-th closest. Pure geometry: no SINR involved.

    The window covers ``max(d)`` plus the radius containing the ``ell``-th
    closest BS with probability ``1 - 1e-12``, so ranking inside the window
    is exact outside that event."""
    seps = tuple(float(d) for d in separations)
    ells = tuple(int(e) for e in ells)
    window = max(seps, default=0.0) + quantile_radius(max(ells), lam, GEOMETRIC_TAIL)

    def fn(ci, n):
        return _closest_chunk(lam, seps, ells, window, master_seed, ci, n)

    tot = _run_chunks(fn, _chunks(trials, chunk_size), threads)
    return ClosestSetSweep(seps, ells, int(trials), **tot)


def _kth_chunk(lam, nu, k, ells, md_window, bs_window, master_seed, chunk_index, n):
    rng = stream(master_seed, ENGINE_KTH_NEIGHBOR, chunk_index)
    md_counts = rng.poisson(nu * math.pi * md_window**2, n)
    if np.any(md_counts < k):
        raise RuntimeError("device window holds fewer than k devices")
    mm = int(md_counts.max())
    mx, my = uniform_disk(rng, (n, mm), md_window)
    md_valid = np.arange(mm)[None, :] < md_counts[:, None]
    kth = _closest(0.0, 0.0, mx, my, md_valid, k)[:, k - 1]
    vx = mx[np.arange(n), kth]
    vy = my[np.arange(n), kth]
    counts = rng.poisson(lam * math.pi * bs_window**2, n)
    m = int(counts.max())
    x, y = uniform_disk(rng, (n, m), bs_window)
    valid = np.arange(m)[None, :] < counts[:, None]
    lmax = max(ells)
    top_u = _closest(0.0, 0.0, x, y, valid, lmax)
    top_v = _closest(vx[:, None], vy[:, None], x, y, valid, lmax)
    same = np.zeros(len(ells), dtype=np.int64)
    for li, ell in enumerate(ells):
        same[li] = np.count_nonzero(
            np.all(np.sort(top_u[:, :ell], axis=1) == np.sort(top_v[:, :ell], axis=1), axis=1))
    return {"same": same, "dist_sum": np.array([np.hypot(vx, vy).sum()])}


def simulate_kth_neighbor_sets(lam: float, nu: float, k: int, ells, trials: int, master_seed: int,
                               threads: int = 1, chunk_size: int = 2048):
    """Sample device and BS PPPs, pair ``u`` with its ``k``-th nearest device
    and count how often their ``ell`` closest BS sets coincide. Returns
    ``({ell: Rate}, mean separation)``."""
    ells = tuple(int(e) for e in ells)
    md_window = quantile_radius(int(k), nu, GEOMETRIC_TAIL)
    bs_window = md_window + quantile_radius(max(ells), lam, GEOMETRIC_TAIL)

    def fn(ci, n):
        return _kth_chunk(lam, nu, int(k), ells, md_window, bs_window, master_seed, ci, n)

    tot = _run_chunks(fn, _chunks(trials, chunk_size), threads)
    rates = {ell: Rate(int(tot["same"][i]), int(trials)) for i, ell in enumerate(ells)}
    return rates, float(tot["dist_sum"][0]) / trials
