"""Run the bundled experiment configs and collect their CSV/gnuplot/manifest outputs.

    python3 scripts/reproduce_figures.py                      # full trial counts
    python3 scripts/reproduce_figures.py --trials 20000 fig4  # quick look
"""

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from collabloc.cli import bundled_configs, load_config, run_experiment


@dataclass
class ReproduceConfig:
    names: list = field(default_factory=bundled_configs)
    out_dir: Path = Path("results")
    trials: int | None = None
    seed: int | None = None
    threads: int = 1


def reproduce(rc: ReproduceConfig) -> dict:
    rc.out_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for name in rc.names:
        cfg = load_config(name).with_overrides(
            seed=rc.seed, trials=rc.trials, threads=rc.threads, out=str(rc.out_dir / f"{name}.csv"))
        t0 = time.perf_counter()
        rows = run_experiment(cfg)
        bad = sum(r["status"] != "ok" for r in rows)
        summary[name] = (len(rows), bad, time.perf_counter() - t0)
        print(f"{name:8s} {len(rows):5d} rows  {bad} flagged  {summary[name][2]:8.1f} s  -> {cfg.output_path}",
              flush=True)
    return summary


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", help="bundled config names (default: all)")
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    ap.add_argument("--trials", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    reproduce(ReproduceConfig(a.names or bundled_configs(), a.out_dir, a.trials, a.seed, a.threads))


if __name__ == "__main__":
    main()
