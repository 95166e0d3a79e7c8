"""Batch experiment runner.

Configs are flat ``key = value`` files with dotted keys, e.g.::

    scenario.isd = 500
    scenario.alpha = 4
    scenario.ell = 2, 3
    sweep.kind = beta_grid
    sweep.values = -20:0:1
    series.kind = separation
    series.values = 50, 150, 300
    modes = noncollab, collab_noshadow
    run.trials = 100000

Thresholds are given in dB. ``a:b:step`` expands to an inclusive range.
Each run writes a CSV table, a gnuplot script next to it and a JSON
manifest. The CSV depends only on the config and the seed; timings go to
the manifest so reruns are byte-identical.
"""

import argparse
import configparser
import csv
import dataclasses
import hashlib
import io
import json
import math
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .analytic import (
    NumericalError,
    QuadratureSpec,
    corollary11_diff_set_given_d,
    corollary21_diff_set_kth_neighbor,
    lemma1_same_lth,
    lemma2_diff_lth,
    p_loc_collab_noshadow,
    p_loc_collab_shadow,
    p_loc_noncollab,
    p_loc_reuse,
    simulate_closest_sets,
    simulate_hearability,
    simulate_kth_neighbor_sets,
)
from .geometry import CirclePair, intersection_area, intersection_area_reference, lune_area
from .propagation import NetworkScenario
from .rigidity import (
    is_redundantly_rigid,
    is_rigid,
    is_three_connected,
    is_triconnected_degree,
    laman_rigid_bruteforce,
    laman_rigid_exhaustive,
    network_localizable,
    read_edge_list,
)

SWEEP_KINDS = ("beta_grid", "d_grid", "k_neighbor_grid", "density_multiplier_grid")
SERIES_KINDS = ("separation", "density_multiplier", "md_per_cell", "shadowing_sigma_db",
                "reuse_factor")
MODES = ("noncollab", "collab_noshadow", "collab_shadow", "collab_reuse", "corollary")
MIN_MC_TRIALS = 1000

COLUMNS = (
    "mode", "series", "series_value", "sweep", "sweep_value",
    "ell", "beta_db", "separation", "bs_density", "md_density", "k",
    "p_nc", "p_nc_err", "p_c", "p_c_err",
    "mc_p_nc", "mc_p_nc_se", "mc_p_c", "mc_p_c_se",
    "p_diff", "p_diff_err", "mc_p_diff", "mc_p_diff_se",
    "status",
)

_SCENARIO_KEYS = {
    "isd", "bs_density", "density_multiplier", "md_per_cell", "md_density", "alpha",
    "beta_db", "tx_power", "noise_power", "shadowing_sigma_db", "shadowing_correlation",
    "reuse_factor", "ell", "separation", "k",
}


class ConfigError(ValueError):
    pass


def hexgrid_equivalent_density(isd: float) -> float:
    """BS density of a PPP with the same mean cell area as a hexagonal grid."""
    if not (isd > 0 and math.isfinite(isd)):
        raise ValueError("intersite distance must be positive")
    return 2.0 / (math.sqrt(3.0) * isd * isd)


@dataclass(frozen=True)
class Sweep:
    kind: str
    values: tuple


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: NetworkScenario
    sweep: Sweep
    modes: tuple
    trials: int
    master_seed: int
    output_path: Path
    separation: float = 0.0
    k: int = 1
    md_per_cell: float | None = None
    series: Sweep | None = None
    threads: int = 1
    ells: tuple = ()
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    source_text: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        validate(self)

    def with_overrides(self, *, seed=None, trials=None, threads=None, out=None):
        changes = {}
        if seed is not None:
            changes["master_seed"] = int(seed)
        if trials is not None:
            changes["trials"] = int(trials)
        if threads is not None:
            changes["threads"] = int(threads)
        if out is not None:
            changes["output_path"] = Path(out)
        return dataclasses.replace(self, **changes)

    def canonical(self) -> dict:
        """Plain-data form used for hashing and the manifest."""
        return {
            "scenario": {k: getattr(self.scenario, k) for k in (
                "bs_density", "md_density", "pathloss_exponent", "sinr_threshold", "tx_power",
                "noise_power", "shadowing_sigma_db", "shadowing_correlation",
                "reuse_factor", "ell")},
            "ells": list(self.ells_or_default),
            "separation": self.separation,
            "k": self.k,
            "md_per_cell": self.md_per_cell,
            "sweep": {"kind": self.sweep.kind, "values": list(self.sweep.values)},
            "series": None if self.series is None else
            {"kind": self.series.kind, "values": list(self.series.values)},
            "modes": list(self.modes),
            "trials": self.trials,
            "master_seed": self.master_seed,
            "quadrature": dataclasses.asdict(self.quadrature),
        }

    @property
    def ells_or_default(self) -> tuple:
        return tuple(self.ells) or (self.scenario.ell,)

    def config_hash(self) -> str:
        blob = json.dumps(self.canonical(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


def validate(cfg: ExperimentConfig) -> None:
    if not cfg.modes:
        raise ConfigError("no modes selected")
    bad = [m for m in cfg.modes if m not in MODES]
    if bad:
        raise ConfigError(f"unknown modes {bad}; choose from {MODES}")
    if cfg.sweep.kind not in SWEEP_KINDS:
        raise ConfigError(f"unknown sweep kind {cfg.sweep.kind!r}")
    for grid, label in ((cfg.sweep, "sweep"), (cfg.series, "series")):
        if grid is None:
            continue
        vals = list(grid.values)
        if not vals:
            raise ConfigError(f"{label} grid is empty")
        if any(b < a for a, b in zip(vals, vals[1:])):
            raise ConfigError(f"{label} grid must be sorted ascending")
    if cfg.series is not None and cfg.series.kind not in SERIES_KINDS:
        raise ConfigError(f"unknown series kind {cfg.series.kind!r}")
    if cfg.trials < MIN_MC_TRIALS:
        raise ConfigError(f"trials must be at least {MIN_MC_TRIALS}")
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")
    if cfg.sweep.kind == "k_neighbor_grid":
        if set(cfg.modes) != {"corollary"}:
            raise ConfigError("k_neighbor_grid supports only the corollary mode")
        md_series = cfg.series is not None and cfg.series.kind == "md_per_cell"
        if cfg.md_per_cell is None and cfg.scenario.md_density is None and not md_series:
            raise ConfigError("k_neighbor_grid needs scenario.md_per_cell or scenario.md_density")
        if any(int(k) != k or k < 1 for k in cfg.sweep.values):
            raise ConfigError("k values must be positive integers")
    if cfg.sweep.kind == "beta_grid" and "corollary" in cfg.modes:
        raise ConfigError("corollary mode does not depend on the threshold; use d_grid")
    if cfg.sweep.kind == "d_grid" and any(d < 0 for d in cfg.sweep.values):
        raise ConfigError("separations must be non-negative")
    if cfg.sweep.kind == "density_multiplier_grid" and any(m <= 0 for m in cfg.sweep.values):
        raise ConfigError("density multipliers must be positive")
    if "collab_noshadow" in cfg.modes:
        shadows = [cfg.scenario.shadowing_sigma_db]
        if cfg.series is not None and cfg.series.kind == "shadowing_sigma_db":
            shadows += list(cfg.series.values)
        if any(s > 0 for s in shadows) or cfg.scenario.reuse_factor != 1:
            raise ConfigError("collab_noshadow needs shadowing_sigma_db = 0 and reuse_factor = 1")


# -- parsing -----------------------------------------------------------------------------

def _parse_list(text: str, cast=float) -> tuple:
    out = []
    for part in (p.strip() for p in text.split(",")):
        if not part:
            continue
        if ":" in part:
            a, b, step = (float(x) for x in part.split(":"))
            if step <= 0:
                raise ConfigError(f"range step must be positive in {part!r}")
            n = int(math.floor((b - a) / step + 1e-9))
            out.extend(cast(round(a + i * step, 12)) for i in range(n + 1))
        else:
            out.append(cast(part))
    return tuple(out)


def _num(x: float):
    return int(x) if float(x).is_integer() else float(x)


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        cp.read_string("[experiment]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None
    kv = dict(cp["experiment"])
    known = ({f"scenario.{k}" for k in _SCENARIO_KEYS}
             | {"sweep.kind", "sweep.values", "series.kind", "series.values", "modes",
                "run.trials", "run.master_seed", "run.threads", "run.output",
                "quadrature.rel_tolerance", "quadrature.abs_tolerance",
                "quadrature.max_evaluations", "quadrature.truncation_tail_mass"})
    unknown = sorted(set(kv) - known)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")

    def get(key, cast=float, default=None):
        if key not in kv:
            if default is None:
                raise ConfigError(f"missing key {key}")
            return default
        try:
            return cast(kv[key])
        except ValueError:
            raise ConfigError(f"bad value for {key}: {kv[key]!r}") from None

    try:
        ells = _parse_list(kv.get("scenario.ell", "2"), int)
        if not ells:
            raise ConfigError("scenario.ell is empty")
        if "scenario.bs_density" in kv:
            base = get("scenario.bs_density")
        else:
            base = hexgrid_equivalent_density(get("scenario.isd", default=500.0))
        lam = base * get("scenario.density_multiplier", default=1.0)
        md_per_cell = get("scenario.md_per_cell", default=-1.0)
        md_per_cell = None if md_per_cell < 0 else md_per_cell
        md_density = get("scenario.md_density", default=-1.0)
        if md_density < 0:
            md_density = None if md_per_cell is None else md_per_cell * lam
        scen = NetworkScenario(
            bs_density=lam,
            md_density=md_density,
            pathloss_exponent=get("scenario.alpha", default=4.0),
            tx_power=get("scenario.tx_power", default=1.0),
            noise_power=get("scenario.noise_power", default=0.0),
            shadowing_sigma_db=get("scenario.shadowing_sigma_db", default=0.0),
            shadowing_correlation=get("scenario.shadowing_correlation", default=0.0),
            reuse_factor=get("scenario.reuse_factor", int, default=1),
            ell=ells[0],
        ).with_beta_db(get("scenario.beta_db", default=-12.0))
        sweep = Sweep(get("sweep.kind", str), _parse_list(get("sweep.values", str)))
        series = None
        if "series.kind" in kv:
            series = Sweep(get("series.kind", str), _parse_list(get("series.values", str)))
        modes = tuple(m.strip() for m in kv.get("modes", "").split(",") if m.strip())
        q = QuadratureSpec(
            rel_tolerance=get("quadrature.rel_tolerance", default=1e-6),
            abs_tolerance=get("quadrature.abs_tolerance", default=1e-9),
            max_evaluations=get("quadrature.max_evaluations", int, default=2_000_000_000),
            truncation_tail_mass=get("quadrature.truncation_tail_mass", default=1e-10),
        )
        out = Path(get("run.output", str, default="results.csv"))
        if base_dir is not None and not out.is_absolute():
            out = base_dir / out
        return ExperimentConfig(
            scenario=scen, sweep=sweep, modes=modes,
            trials=get("run.trials", int, default=1_000_000),
            master_seed=get("run.master_seed", int, default=1),
            output_path=out,
            separation=get("scenario.separation", default=0.0),
            k=get("scenario.k", int, default=1),
            md_per_cell=md_per_cell,
            series=series,
            threads=get("run.threads", int, default=1),
            ells=ells,
            quadrature=q,
            source_text=text,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        bundled = resources.files("collabloc") / "configs" / f"{path.stem}.cfg"
        if bundled.is_file():
            return parse_config(bundled.read_text(), base_dir=Path.cwd())
        raise ConfigError(f"config not found: {path}")
    return parse_config(path.read_text(), base_dir=path.parent)


def bundled_configs() -> list:
    root = resources.files("collabloc") / "configs"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


# -- running -------------------------------------------------------------------------------

@dataclass
class _Point:
    """One grid point with every parameter resolved."""

    series_value: object
    sweep_value: object
    scen: NetworkScenario
    beta_db: float
    separation: float
    k: int
    md_density: float | None


def _apply(cfg, scen, sep, k, md_per_cell, kind, value):
    md = scen.md_density
    if kind == "separation":
        sep = float(value)
    elif kind == "density_multiplier":
        scen = dataclasses.replace(scen, bs_density=scen.bs_density * value)
        if md_per_cell is not None:
            md = md_per_cell * scen.bs_density
    elif kind == "md_per_cell":
        md_per_cell = float(value)
        md = md_per_cell * scen.bs_density
    elif kind == "shadowing_sigma_db":
        scen = dataclasses.replace(scen, shadowing_sigma_db=float(value))
    elif kind == "reuse_factor":
        scen = dataclasses.replace(scen, reuse_factor=int(value))
    elif kind == "beta_grid":
        scen = scen.with_beta_db(float(value))
    elif kind == "d_grid":
        sep = float(value)
    elif kind == "k_neighbor_grid":
        k = int(value)
    elif kind == "density_multiplier_grid":
        return _apply(cfg, scen, sep, k, md_per_cell, "density_multiplier", value)
    if md is not None and md != scen.md_density:
        scen = dataclasses.replace(scen, md_density=md)
    return scen, sep, k, md_per_cell


def _series_points(cfg, ell, series_value):
    scen, sep, k, mpc = cfg.scenario, cfg.separation, cfg.k, cfg.md_per_cell
    scen = dataclasses.replace(scen, ell=ell)
    if cfg.series is not None:
        scen, sep, k, mpc = _apply(cfg, scen, sep, k, mpc, cfg.series.kind, series_value)
    pts = []
    for v in cfg.sweep.values:
        s2, sep2, k2, _ = _apply(cfg, scen, sep, k, mpc, cfg.sweep.kind, v)
        pts.append(_Point(series_value, v, s2, s2.beta_db, sep2, k2, s2.md_density))
    return pts


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".10g")


def _safe(fn, *args):
    """Call a quadrature routine; on non-convergence keep the partial value."""
    try:
        return fn(*args), ""
    except NumericalError as exc:
        return exc.partial, f"numerical_error: {exc}"


def _row(cfg, pt, mode, **vals):
    row = {c: "" for c in COLUMNS}
    row.update(
        mode=mode,
        series="" if cfg.series is None else cfg.series.kind,
        series_value=_fmt(pt.series_value) if cfg.series is not None else "",
        sweep=cfg.sweep.kind,
        sweep_value=_fmt(pt.sweep_value),
        ell=_fmt(pt.scen.ell),
        beta_db=_fmt(pt.beta_db),
        separation=_fmt(pt.separation),
        bs_density=_fmt(pt.scen.bs_density),
        md_density=_fmt(pt.md_density),
        k=_fmt(pt.k) if cfg.sweep.kind == "k_neighbor_grid" else "",
        status="ok",
    )
    if mode == "corollary":
        row["beta_db"] = ""
        if cfg.sweep.kind == "k_neighbor_grid":
            row["separation"] = ""
    for key, v in vals.items():
        row[key] = v if key == "status" else _fmt(v)
    return row


def _est(prefix, e):
    if e is None:
        return {}
    return {prefix: e.value, f"{prefix}_err": e.error_bound}


def _rate(prefix, r):
    return {prefix: r.value, f"{prefix}_se": r.se}


def _group_by_scenario(points):
    groups = {}
    for pt in points:
        key = dataclasses.replace(pt.scen, sinr_threshold=1.0)
        groups.setdefault(key, []).append(pt)
    return groups


def _hearability_rows(cfg, points):
    rows = {}
    mc_modes = [m for m in cfg.modes if m != "corollary"]
    if not mc_modes:
        return rows
    for _, pts in _group_by_scenario(points).items():
        scen = pts[0].scen
        betas = sorted({p.beta_db for p in pts})
        seps = sorted({p.separation for p in pts})
        sweep = simulate_hearability(scen, seps, betas, cfg.trials, cfg.master_seed,
                                     ells=(scen.ell,))
        pdiff_cache = {}
        for pt in pts:
            ell, b, d = scen.ell, pt.beta_db, pt.separation
            pmf_u, pmf_v = sweep.pmf_u(b), sweep.pmf_v(d, b)
            nc = p_loc_noncollab(pmf_u, ell)
            mc_nc = sweep.noncollab_rate(b, ell)
            mc_c = sweep.collab_rate(d, b, ell)
            base = {**_est("p_nc", nc), **_rate("mc_p_nc", mc_nc)}
            for mode in mc_modes:
                status = "ok"
                extra = {}
                if mode == "noncollab":
                    pass
                elif mode == "collab_noshadow":
                    if d not in pdiff_cache:
                        pdiff_cache[d] = _safe(corollary11_diff_set_given_d, d, ell,
                                               scen.bs_density, cfg.quadrature)
                    pdiff, msg = pdiff_cache[d]
                    status = msg or status
                    extra = {**_est("p_c", p_loc_collab_noshadow(pmf_u, pmf_v, pdiff, ell)),
                             **_est("p_diff", pdiff), **_rate("mc_p_c", mc_c)}
                    sr = sweep.diff_set_rate(d, ell)
                    extra.update(_rate("mc_p_diff", sr))
                elif mode == "collab_shadow":
                    extra = {**_est("p_c", p_loc_collab_shadow(pmf_u, pmf_v, ell)),
                             **_rate("mc_p_c", mc_c)}
                elif mode == "collab_reuse":
                    res = p_loc_reuse(pmf_u, pmf_v, ell)
                    extra = {**_est("p_nc", res.noncollab), **_est("p_c", res.collab),
                             **_rate("mc_p_c", mc_c)}
                rows[(id(pt), mode)] = _row(cfg, pt, mode, **{**base, **extra}, status=status)
    return rows


def _corollary_rows(cfg, points):
    rows = {}
    if "corollary" not in cfg.modes:
        return rows
    q = cfg.quadrature
    if cfg.sweep.kind == "k_neighbor_grid":
        for pt in points:
            ell, lam, nu = pt.scen.ell, pt.scen.bs_density, pt.md_density
            est, msg = _safe(corollary21_diff_set_kth_neighbor, pt.k, ell, lam, nu, q)
            rates, mean_d = simulate_kth_neighbor_sets(lam, nu, pt.k, (ell,), cfg.trials,
                                                       cfg.master_seed)
            same = rates[ell]
            diff = type(same)(same.trials - same.successes, same.trials)
            rows[(id(pt), "corollary")] = _row(cfg, pt, "corollary", **_est("p_diff", est),
                                               **_rate("mc_p_diff", diff),
                                               status=msg or "ok")
        return rows
    by_density = {}
    for pt in points:
        by_density.setdefault((pt.scen.bs_density, pt.scen.ell), []).append(pt)
    for (lam, ell), pts in by_density.items():
        seps = sorted({p.separation for p in pts})
        mc = simulate_closest_sets(lam, seps, (ell,), cfg.trials, cfg.master_seed)
        for pt in pts:
            est, msg = _safe(corollary11_diff_set_given_d, pt.separation, ell, lam, q)
            same = mc.same_set_rate(pt.separation, ell)
            diff = type(same)(same.trials - same.successes, same.trials)
            rows[(id(pt), "corollary")] = _row(cfg, pt, "corollary", **_est("p_diff", est),
                                               **_rate("mc_p_diff", diff), status=msg or "ok")
    return rows


def _run_series(cfg, ell, series_value):
    t0 = time.perf_counter()
    points = _series_points(cfg, ell, series_value)
    rows = {**_hearability_rows(cfg, points), **_corollary_rows(cfg, points)}
    ordered = [rows[(id(pt), m)] for m in cfg.modes for pt in points]
    return ordered, time.perf_counter() - t0


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> list:
    """Evaluate every grid point; returns rows as dicts keyed by ``COLUMNS``.

    All series share the master seed (common random numbers), so curves
    for different series values are compared on the same sampled worlds.
    """
    series_values = list(cfg.series.values) if cfg.series is not None else [None]
    units = [(ell, v) for ell in cfg.ells_or_default for v in series_values]
    t0 = time.perf_counter()
    if cfg.threads > 1 and len(units) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(lambda u: _run_series(cfg, *u), units))
    else:
        results = [_run_series(cfg, *u) for u in units]
    rows = [r for part, _ in results for r in part]
    if write:
        timings = {f"ell={ell}" + ("" if v is None else f",{_fmt(v)}"): round(dt, 3)
                   for (ell, v), (_, dt) in zip(units, results)}
        write_outputs(cfg, rows, timings, time.perf_counter() - t0)
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def gnuplot_script(cfg: ExperimentConfig, csv_name: str) -> str:
    col = {c: i + 1 for i, c in enumerate(COLUMNS)}
    x = col["sweep_value"]
    lines = [
        "set datafile separator ','",
        "set key outside right",
        f"set xlabel '{cfg.sweep.kind}'",
        "set ylabel 'probability'",
        "set yrange [0:1]",
        "set grid",
    ]
    series_vals = list(cfg.series.values) if cfg.series is not None else [None]
    plots = []
    for mode in cfg.modes:
        ycols = ([("p_diff", "analytic"), ("mc_p_diff", "MC")] if mode == "corollary" else
                 [("p_nc", "analytic nc"), ("p_c", "analytic c"),
                  ("mc_p_nc", "MC nc"), ("mc_p_c", "MC c")])
        for ell, sv in ((e, v) for e in cfg.ells_or_default for v in series_vals):
            cond = f'strcol({col["mode"]}) eq "{mode}" && ${col["ell"]} == {ell}'
            label = f"{mode} ell={ell}"
            if sv is not None:
                cond += f' && strcol({col["series_value"]}) eq "{_fmt(sv)}"'
                label += f" {cfg.series.kind}={_fmt(sv)}"
            for name, tag in ycols:
                if mode in ("noncollab",) and name in ("p_c", "mc_p_c"):
                    continue
                style = "points" if name.startswith("mc_") else "lines"
                plots.append(f"'{csv_name}' every ::1 using {x}:({cond} ? ${col[name]} : 1/0) "
                             f"with {style} title '{label} {tag}'")
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def write_outputs(cfg, rows, timings, total_seconds):
    out = Path(cfg.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(rows_to_csv(rows), encoding="utf-8")
    out.with_suffix(".gp").write_text(gnuplot_script(cfg, out.name), encoding="utf-8")
    manifest = {
        "config_hash": cfg.config_hash(),
        "master_seed": cfg.master_seed,
        "trials": cfg.trials,
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": platform.python_version(),
        "rows": len(rows),
        "columns": list(COLUMNS),
        "config": cfg.canonical(),
        "wall_clock_seconds": {"total": round(total_seconds, 3), "per_series": timings},
    }
    out.with_suffix(".json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                        encoding="utf-8")


# -- oracles ---------------------------------------------------------------------------------

def _oracle_circle(args):
    p = CirclePair(args.r_u, args.r_v, args.d)
    print(f"regime            {p.regime}")
    print(f"lune_area         {lune_area(p):.15g}")
    print(f"intersection      {intersection_area(p):.15g}")
    print(f"reference         {intersection_area_reference(p.r_u, p.r_v, p.d):.15g}")


def _oracle_laman(args):
    g = read_edge_list(Path(args.path).read_text())
    print(f"anchors={g.anchor_count} free={g.free_count} edges={len(g.edges)}")
    print(f"rigid (pebble)     {is_rigid(g)}")
    print(f"rigid (subsets)    {laman_rigid_bruteforce(g)}")
    if g.n <= args.limit:
        try:
            print(f"rigid (exhaustive) {laman_rigid_exhaustive(g)}")
        except ValueError as exc:
            print(f"rigid (exhaustive) skipped: {exc}")
    print(f"degree >= 3        {is_triconnected_degree(g)}")
    print(f"3-connected        {is_three_connected(g)}")
    print(f"redundantly rigid  {is_redundantly_rigid(g)}")
    if g.anchor_count >= 3:
        print(f"localizable        {network_localizable(g)}")


def _oracle_classify(args):
    lam = args.density if args.density else hexgrid_equivalent_density(args.isd)
    q = QuadratureSpec()
    mc = simulate_closest_sets(lam, [args.d], (args.ell,), args.trials, args.seed)
    l1 = lemma1_same_lth(args.d, args.ell, lam, q)
    l2 = lemma2_diff_lth(args.d, args.ell, lam, q)
    for name, est, rate in (("same set, same ell-th", l1, mc.same_lth_rate(args.d, args.ell)),
                            ("same set, diff ell-th", l2, mc.diff_lth_rate(args.d, args.ell))):
        print(f"{name:24s} quadrature {est.value:.6f} +- {est.error_bound:.1e}   "
              f"MC {rate.value:.6f} +- {rate.se:.1e}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="collabloc", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def overrides(p):
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--out")

    run = sub.add_parser("run", help="run an experiment config (path or bundled name)")
    run.add_argument("config")
    overrides(run)
    val = sub.add_parser("validate", help="check a config without running it")
    val.add_argument("config")
    overrides(val)
    sub.add_parser("list", help="list bundled configs")

    orc = sub.add_parser("oracle", help="brute-force reference computations")
    osub = orc.add_subparsers(dest="oracle", required=True)
    c = osub.add_parser("circle")
    c.add_argument("r_u", type=float)
    c.add_argument("r_v", type=float)
    c.add_argument("d", type=float)
    lam = osub.add_parser("laman")
    lam.add_argument("path", help="edge list: header 'B C', then 'i j' per line")
    lam.add_argument("--limit", type=int, default=7)
    cl = osub.add_parser("classify")
    cl.add_argument("--d", type=float, required=True)
    cl.add_argument("--ell", type=int, default=2)
    cl.add_argument("--isd", type=float, default=500.0)
    cl.add_argument("--density", type=float)
    cl.add_argument("--trials", type=int, default=100_000)
    cl.add_argument("--seed", type=int, default=1)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list":
            print("\n".join(bundled_configs()))
            return 0
        if args.command == "oracle":
            {"circle": _oracle_circle, "laman": _oracle_laman,
             "classify": _oracle_classify}[args.oracle](args)
            return 0
        cfg = load_config(args.config).with_overrides(
            seed=args.seed, trials=args.trials, threads=args.threads, out=args.out)
        validate(cfg)
        if args.command == "validate":
            print(f"ok  {cfg.config_hash()[:16]}  modes={','.join(cfg.modes)}  "
                  f"points={len(cfg.sweep.values) * (len(cfg.series.values) if cfg.series else 1) * len(cfg.ells_or_default)}")
            return 0
        rows = run_experiment(cfg)
        failed = sum(r["status"] != "ok" for r in rows)
        print(f"wrote {len(rows)} rows to {cfg.output_path}" + (f" ({failed} with numerical errors)" if failed else ""))
        return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
