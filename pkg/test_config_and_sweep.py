#!/usr/bin/env python3
"""Checks for experiment config loading, sweep evaluation and the result writer."""
import json
import math
from types import SimpleNamespace

import numpy as np
import pytest

from experiment.config import (DATA_DIR, DEFAULT_CONFIG, ALLOWED_PATHS, config_from_dict,
                               default_config, load_default_config, parse_config, scenario_at,
                               set_path)
from experiment.interferometer import Configuration
from experiment.reporting.result_writer import ResultWriter, format_value, read_csv
from experiment.sweep import check_row, columns_for, default_workers, run, sweep_points
from physics.errors import ConfigError, NumericalGuardError
from physics.params import magnon_period


def _sweep(path, start, stop, count, **extra):
    axis = {"path": path, "start": start, "stop": stop, "count": count}
    axis.update(extra)
    return {"axes": [axis]}


def test_default_file_matches_builtin():
    assert load_default_config() == DEFAULT_CONFIG


def test_default_config_copy_is_independent():
    cfg = default_config("parallel")
    cfg["material"]["Q_s"] = 1.0
    assert cfg["configuration"] == "parallel"
    assert DEFAULT_CONFIG["material"]["Q_s"] == 1e-4


def test_minimal_config_uses_defaults():
    cfg = config_from_dict({"configuration": "parallel"})
    assert cfg.configuration is Configuration.PARALLEL
    p = cfg.scenario.params
    assert abs(p.material.lambda_0 - 1550e-9) < 1e-21
    assert abs(p.sphere.R_s - 100e-6) < 1e-18
    assert abs(p.field.omega_m - 2 * math.pi * 3e9) < 1e-3
    assert cfg.scenario.coupler.upsilon == pytest.approx(1.0)
    assert cfg.collapse_d == 0.0
    assert cfg.sweep is None
    assert cfg.output.format == "csv"


def test_configuration_required():
    with pytest.raises(ConfigError) as info:
        config_from_dict({"material": {"Q_s": 1e-4}})
    assert info.value.field_path == "configuration"


@pytest.mark.parametrize("data, path", [
    ({"configuration": "diagonal"}, "configuration"),
    ({"configuration": "parallel", "material": {"Q": 1}}, "material.Q"),
    ({"configuration": "parallel", "lights": {}}, "lights"),
    ({"configuration": "parallel", "material": {"Q_s": 0.5}}, "material"),
    ({"configuration": "parallel", "material": {"n_0": "high"}}, "material.n_0"),
    ({"configuration": "parallel", "coupler": {"t_mag": 0.5, "r_mag": 0.5}}, "coupler"),
    ({"configuration": "parallel", "optics": {"input_sop": "Q"}}, "optics.input_sop"),
    ({"configuration": "parallel", "collapse_d": 2.0}, "collapse_d"),
    ({"configuration": "parallel", "fock_dim": 1}, "fock_dim"),
    ({"configuration": "parallel", "oracle": "yes"}, "oracle"),
    ({"configuration": "parallel", "seed": 1.5}, "seed"),
    ({"configuration": "parallel", "output": {"format": "xml"}}, "output.format"),
    ({"configuration": "parallel", "sweep": _sweep("optics.theta", 0, 1, 1)}, "sweep.axes[0].count"),
    ({"configuration": "parallel", "sweep": _sweep("optics.colour", 0, 1, 3)}, "sweep.axes[0].path"),
    ({"configuration": "parallel", "sweep": _sweep("optics.theta", 0, 1, 3, scale="cubic")},
     "sweep.axes[0].scale"),
    ({"configuration": "parallel", "sweep": _sweep("sphere.R_s_um", 0, 100, 3, scale="log")}, "sweep.axes[0]"),
    ({"configuration": "parallel", "sweep": {"axes": []}}, "sweep.axes"),
    ({"configuration": "parallel", "sweep": _sweep("coupler.splitting_ratio", 0.5, 1.5, 3)}, "coupler"),
])
def test_invalid_configs_name_the_field(data, path):
    with pytest.raises(ConfigError) as info:
        config_from_dict(data)
    assert info.value.field_path == path
    assert str(info.value).startswith(f"{path}: ")


def test_too_many_axes_rejected():
    axes = [{"path": p, "start": 0, "stop": 0.1, "count": 2}
            for p in ("optics.theta", "optics.phi", "optics.theta_m2")]
    with pytest.raises(ConfigError):
        config_from_dict({"configuration": "parallel", "sweep": {"axes": axes}})


def test_unit_alternatives_replace_defaults():
    cfg = config_from_dict({"configuration": "perpendicular", "timing": {"delta_t_periods": 0.5},
                            "material": {"lambda_0": 1310e-9}, "sphere": {"R_s": 125e-6}})
    p = cfg.scenario.params
    assert abs(p.timing.delta_t - magnon_period(p.field) / 2) < 1e-24
    assert p.material.lambda_0 == 1310e-9
    assert p.sphere.R_s == 125e-6
    assert "delta_t" not in cfg.raw["timing"]


def test_field_from_dc_field():
    base = config_from_dict({"configuration": "parallel"}).scenario.params.field
    cfg = config_from_dict({"configuration": "parallel", "field": {"H_dc": base.H_dc}})
    assert cfg.scenario.params.field.omega_m == pytest.approx(base.omega_m, rel=1e-12)


def test_coupler_amplitudes():
    cfg = config_from_dict({"configuration": "parallel",
                            "coupler": {"t_mag": math.sqrt(0.8), "r_mag": math.sqrt(0.2)}})
    assert cfg.scenario.coupler.upsilon == pytest.approx(0.25)
    assert "splitting_ratio" not in cfg.raw["coupler"]


def test_set_path_keeps_coupler_normalized():
    raw = default_config()
    set_path(raw, "coupler.t_mag", 0.9)
    assert raw["coupler"]["t_mag"] ** 2 + raw["coupler"]["r_mag"] ** 2 == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        set_path(raw, "coupler.nothing", 1.0)


def test_allowed_paths_cover_scalars():
    assert "collapse_d" in ALLOWED_PATHS
    assert "optics.input_sop" not in ALLOWED_PATHS
    assert "timing.delta_t_periods" in ALLOWED_PATHS


def test_parse_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text('{"configuration": "parallel",\n  "material": }')
    with pytest.raises(ConfigError, match="line 2"):
        parse_config(bad)


def test_shipped_examples_parse():
    for name in ("perpendicular_delay_sweep", "parallel_som_angle_sweep", "collapse_sweep_oracle"):
        cfg = parse_config(f"{DATA_DIR}/examples/{name}.json")
        assert cfg.sweep is not None


def test_overrides():
    cfg = config_from_dict({"configuration": "perpendicular"})
    changed = cfg.with_overrides(oracle=True, fock_dim=48, seed=5, output_path="out.json",
                                 output_format="json")
    assert changed.oracle and changed.scenario.oracle
    assert changed.fock_dim == 48
    assert changed.seed == 5
    assert changed.output.path == "out.json"
    assert changed.output.format == "json"
    assert cfg.oracle is False
    assert cfg.with_overrides().raw == cfg.raw


def test_sweep_grid_order():
    cfg = config_from_dict({"configuration": "parallel", "sweep": {"axes": [
        {"path": "optics.theta", "start": 0.0, "stop": 1.0, "count": 3},
        {"path": "optics.phi", "start": 0.0, "stop": 0.5, "count": 2},
    ]}})
    points = sweep_points(cfg)
    assert [p.index for p in points] == list(range(6))
    assert [p.assignments["optics.theta"] for p in points] == [0.0, 0.0, 0.5, 0.5, 1.0, 1.0]
    assert [p.assignments["optics.phi"] for p in points] == [0.0, 0.5] * 3
    assert columns_for(cfg)[:3] == ["index", "optics.theta", "optics.phi"]


def test_log_axis():
    cfg = config_from_dict({"configuration": "perpendicular",
                            "sweep": _sweep("sphere.R_s_um", 10.0, 1000.0, 3, scale="log")})
    values = cfg.sweep.axes[0].values()
    assert np.allclose(values, [10.0, 100.0, 1000.0])


def test_scenario_at_applies_assignment():
    cfg = config_from_dict({"configuration": "perpendicular"})
    s = scenario_at(cfg, {"magnon.alpha_i_mag": 0.7})
    assert s.magnon.alpha_i_mag == 0.7
    assert scenario_at(cfg, {}) is cfg.scenario


def test_single_point_run():
    result = run(config_from_dict({"configuration": "perpendicular"}), workers=0)
    assert len(result.rows) == 1
    assert result.rows[0]["index"] == 0
    assert result.rows[0]["purity_oracle"] is None


def test_oracle_sweep_agrees_with_closed_form():
    cfg = parse_config(f"{DATA_DIR}/examples/collapse_sweep_oracle.json")
    result = run(cfg, workers=0)
    assert [row["collapse_d"] for row in result.rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
    for row in result.rows:
        assert abs(row["purity_oracle"] - row["purity_closed_form"]) < 1e-8
        assert row["p_T_unitary"] == result.rows[0]["p_T_unitary"]
    assert result.rows[-1]["p_T_collapsed"] == pytest.approx(result.rows[-1]["p_T_unitary"], abs=1e-15)
    assert result.rows[0]["p_T_collapsed"] == pytest.approx(0.5, abs=1e-15)


def test_thread_pool_preserves_order():
    cfg = config_from_dict({"configuration": "perpendicular", "magnon": {"alpha_i_mag": 1.0},
                            "sweep": _sweep("timing.delta_t_periods", 0.0, 1.0, 9)})
    serial = run(cfg, workers=0)
    pooled = run(cfg, workers=4)
    assert pooled.rows == serial.rows


def test_parallel_flag_forces_serial():
    cfg = config_from_dict({"configuration": "perpendicular",
                            "sweep": dict(_sweep("collapse_d", 0.0, 1.0, 3), parallel=False)})
    assert len(run(cfg, workers=8).rows) == 3


def test_default_workers_from_env(monkeypatch):
    monkeypatch.delenv("FOLM_WORKERS", raising=False)
    assert default_workers() == 0
    monkeypatch.setenv("FOLM_WORKERS", "3")
    assert default_workers() == 3
    monkeypatch.setenv("FOLM_WORKERS", "many")
    assert default_workers() == 0


def test_guard_names_the_sweep_point():
    broken = SimpleNamespace(p_T=0.6, p_R=0.6, schmidt=SimpleNamespace(purity=1.0))
    with pytest.raises(NumericalGuardError) as info:
        check_row(7, broken)
    assert info.value.index == 7
    assert "sweep point 7" in str(info.value)
    impure = SimpleNamespace(p_T=0.5, p_R=0.5, schmidt=SimpleNamespace(purity=0.3))
    with pytest.raises(NumericalGuardError):
        check_row(0, impure)


def test_format_value():
    assert format_value(None) == ""
    assert format_value(True) == "true"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value("parallel") == "parallel"


def test_csv_writer_round_trip(tmp_path):
    path = tmp_path / "nested" / "out.csv"
    writer = ResultWriter(["index", "eta", "purity_oracle"], str(path))
    writer.add({"index": 0, "eta": 0.25, "purity_oracle": None})
    writer.add({"index": 1, "eta": 0.5, "purity_oracle": 0.75})
    text = writer.write()
    assert text.count("index,eta,purity_oracle") == 1
    rows = read_csv(str(path))
    assert [r["index"] for r in rows] == ["0", "1"]
    assert rows[0]["purity_oracle"] == ""
    assert float(rows[1]["eta"]) == 0.5


def test_csv_writer_quotes_cells(tmp_path):
    path = tmp_path / "quoted.csv"
    writer = ResultWriter(["index", "label"], str(path))
    writer.add({"index": 0, "label": "a,b"})
    text = writer.write()
    assert text == 'index,label\n0,"a,b"\n'
    assert read_csv(str(path))[0]["label"] == "a,b"


def test_json_writer(tmp_path):
    path = tmp_path / "out.json"
    writer = ResultWriter(["index", "eta"], str(path), "json")
    writer.add({"index": 0, "eta": 0.25})
    writer.write()
    doc = json.loads(path.read_text())
    assert doc["columns"] == ["index", "eta"]
    assert doc["rows"] == [{"index": 0, "eta": 0.25}]
    with pytest.raises(ValueError):
        ResultWriter(["index"], fmt="xml")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
