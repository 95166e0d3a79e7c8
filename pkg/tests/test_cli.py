import json
import math

import numpy as np
import pytest

from collabloc.cli import (
    COLUMNS,
    ConfigError,
    bundled_configs,
    hexgrid_equivalent_density,
    load_config,
    main,
    parse_config,
    run_experiment,
    validate,
)
from conftest import LAM0

BASE = """
scenario.isd = 500
scenario.ell = 2
run.trials = 2000
run.master_seed = 3
"""


def cfg_text(*lines):
    return BASE + "\n".join(lines) + "\n"


def test_hexgrid_density():
    assert hexgrid_equivalent_density(500) == pytest.approx(LAM0, rel=1e-12)
    assert hexgrid_equivalent_density(500) == pytest.approx(4.6188e-6, rel=1e-4)
    assert hexgrid_equivalent_density(1) == pytest.approx(1.1547, rel=1e-4)
    assert hexgrid_equivalent_density(1000) == pytest.approx(LAM0 / 4, rel=1e-12)


def test_ranges_and_lists_parse():
    cfg = parse_config(cfg_text("sweep.kind = d_grid", "sweep.values = 0:100:25",
                                "series.kind = density_multiplier", "series.values = 0.5, 1",
                                "modes = corollary"))
    assert cfg.sweep.values == (0, 25, 50, 75, 100)
    assert cfg.series.values == (0.5, 1)
    assert cfg.ells_or_default == (2,)


@pytest.mark.parametrize("extra, needle", [
    (("sweep.kind = d_grid", "sweep.values = 0:100:25", "modes = telepathy"), "mode"),
    (("sweep.kind = zigzag", "sweep.values = 1", "modes = corollary"), "kind"),
    (("sweep.kind = d_grid", "sweep.values = 50, 10", "modes = corollary"), "sort"),
    (("sweep.kind = d_grid", "sweep.values = 0:100:25", "modes = corollary", "scenario.colour = red"), "colour"),
    (("sweep.kind = beta_grid", "sweep.values = -10", "modes = corollary"), "corollary"),
    (("sweep.kind = k_neighbor_grid", "sweep.values = 1:3:1", "modes = corollary"), "density"),
    (("sweep.kind = k_neighbor_grid", "sweep.values = 1:3:1", "scenario.md_per_cell = 5", "modes = noncollab"), "corollary"),
    (("sweep.kind = beta_grid", "sweep.values = -10", "modes = collab_noshadow", "scenario.shadowing_sigma_db = 8"), "shadow"),
    (("sweep.kind = d_grid", "sweep.values = -5, 10", "modes = corollary"), "negative"),
])
def test_invalid_configs_are_rejected(extra, needle):
    with pytest.raises(ConfigError) as info:
        parse_config(cfg_text(*extra))
    assert needle in str(info.value).lower()


def test_too_few_trials_rejected():
    cfg = parse_config(cfg_text("sweep.kind = d_grid", "sweep.values = 0", "modes = corollary"))
    with pytest.raises(ConfigError):
        validate(cfg.with_overrides(trials=999))


@pytest.mark.parametrize("name", ["fig4", "fig5_6", "fig7", "fig8", "fig9"])
def test_bundled_configs_validate(name):
    assert name in bundled_configs()
    cfg = load_config(name)
    validate(cfg)
    assert cfg.trials >= 1000


def _run(tmp_path, name, text, **over):
    cfg = parse_config(text).with_overrides(out=str(tmp_path / f"{name}.csv"), **over)
    return cfg, run_experiment(cfg)


def test_rerun_is_byte_identical(tmp_path):
    text = cfg_text("sweep.kind = beta_grid", "sweep.values = -14:-8:3",
                    "series.kind = separation", "series.values = 50, 150",
                    "modes = noncollab, collab_noshadow", "quadrature.rel_tolerance = 1e-5")
    cfg, rows = _run(tmp_path, "a", text)
    first = (tmp_path / "a.csv").read_bytes()
    _run(tmp_path, "a", text, threads=2)
    assert (tmp_path / "a.csv").read_bytes() == first
    assert (tmp_path / "a.gp").exists()
    manifest = json.loads((tmp_path / "a.json").read_text())
    assert manifest["config_hash"] == cfg.config_hash()
    assert manifest["rows"] == len(rows) == 2 * 3 * 2
    assert first.decode().splitlines()[0].split(",") == list(COLUMNS)
    for r in rows:
        assert r["status"] == "ok"
        for key in ("p_nc", "p_c", "mc_p_nc", "mc_p_c"):
            if r[key] != "":
                assert 0.0 <= float(r[key]) <= 1.0
        if r["mode"] == "noncollab":
            assert r["p_c"] == ""
        else:
            assert float(r["p_c"]) >= float(r["p_nc"]) - 1e-12


def test_seed_override_changes_sampled_columns(tmp_path):
    text = cfg_text("sweep.kind = beta_grid", "sweep.values = -10", "modes = noncollab")
    _, a = _run(tmp_path, "s1", text)
    _, b = _run(tmp_path, "s2", text, seed=99)
    assert a[0]["mc_p_nc"] != b[0]["mc_p_nc"]


def test_density_curves_order(tmp_path):
    text = cfg_text("sweep.kind = d_grid", "sweep.values = 0:500:100",
                    "series.kind = density_multiplier", "series.values = 0.5, 1, 2",
                    "modes = corollary", "quadrature.rel_tolerance = 1e-5")
    _, rows = _run(tmp_path, "f4", text)
    curves = {}
    for r in rows:
        curves.setdefault(float(r["series_value"]), []).append(float(r["p_diff"]))
    for c in curves.values():
        assert c[0] == pytest.approx(0.0, abs=1e-6)
        assert np.all(np.diff(c) > 0)
    assert np.all(np.array(curves[2.0][1:]) > np.array(curves[1.0][1:]))
    assert np.all(np.array(curves[1.0][1:]) > np.array(curves[0.5][1:]))
    for r in rows:
        assert abs(float(r["p_diff"]) - float(r["mc_p_diff"])) <= 3 * float(r["mc_p_diff_se"]) + 0.01


def test_neighbor_rank_curve_rises_with_shrinking_steps(tmp_path):
    text = cfg_text("sweep.kind = k_neighbor_grid", "sweep.values = 1:4:1",
                    "series.kind = md_per_cell", "series.values = 10",
                    "modes = corollary", "quadrature.rel_tolerance = 1e-4")
    _, rows = _run(tmp_path, "f7", text)
    p = np.array([float(r["p_diff"]) for r in rows])
    steps = np.diff(p)
    assert np.all(steps > 0) and np.all(np.diff(steps) < 0)
    assert all(r["separation"] == "" and r["beta_db"] == "" for r in rows)


def test_main_exit_codes(tmp_path, capsys):
    assert main(["list"]) == 0
    assert "fig4" in capsys.readouterr().out
    assert main(["validate", "fig8"]) == 0
    assert capsys.readouterr().out.startswith("ok")
    bad = tmp_path / "bad.cfg"
    bad.write_text(cfg_text("sweep.kind = d_grid", "sweep.values = 0", "modes = nope"))
    assert main(["validate", str(bad)]) == 2
    assert capsys.readouterr().err.startswith("error:")
    assert main(["run", str(tmp_path / "missing.cfg")]) == 2
    good = tmp_path / "good.cfg"
    good.write_text(cfg_text("sweep.kind = beta_grid", "sweep.values = -10", "modes = noncollab"))
    assert main(["run", str(good), "--out", str(tmp_path / "o.csv")]) == 0
    assert (tmp_path / "o.csv").exists()


def test_oracle_commands(tmp_path, capsys):
    assert main(["oracle", "circle", "1", "1", "1"]) == 0
    out = capsys.readouterr().out
    expect = 2 * math.pi / 3 - math.sqrt(3) / 2
    assert f"{expect:.12g}"[:10] in out
    edges = tmp_path / "g.txt"
    edges.write_text("3 1\n0 3\n1 3\n2 3\n")  # one device hearing three anchors
    assert main(["oracle", "laman", str(edges)]) == 0
    out = capsys.readouterr().out
    assert "rigid (pebble)     True" in out and "localizable        True" in out
    assert main(["oracle", "classify", "--d", "150", "--trials", "20000"]) == 0
    assert "quadrature" in capsys.readouterr().out


def test_shadowing_and_reuse_modes(tmp_path):
    text = cfg_text("scenario.shadowing_sigma_db = 8", "scenario.shadowing_correlation = 0.5",
                    "scenario.reuse_factor = 3", "sweep.kind = beta_grid", "sweep.values = -12, -6",
                    "series.kind = separation", "series.values = 10",
                    "modes = noncollab, collab_shadow, collab_reuse")
    _, rows = _run(tmp_path, "k3", text)
    assert sorted({r["mode"] for r in rows}) == ["collab_reuse", "collab_shadow", "noncollab"]
    for r in rows:
        assert r["status"] == "ok"
        if r["mode"] != "noncollab":
            assert float(r["p_c"]) >= float(r["p_nc"])
            assert 0 <= float(r["mc_p_c"]) <= 1
