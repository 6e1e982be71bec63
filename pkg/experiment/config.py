"""Experiment configuration files.

A config is a JSON object. Missing keys are filled from ``DEFAULT_CONFIG``
(the same content as ``data/default_config.json``) by a deep merge, then the
blocks are validated into the parameter dataclasses. Every rejection is a
ConfigError naming the offending field path, e.g. ``coupler`` or
``sweep.axes[0].count``.
"""
import copy
import json
import math
import os
from dataclasses import dataclass, field
from logging import getLogger
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from experiment.interferometer import (CollapseModel, Configuration, CouplerParams, MagnonSetup,
                                       OpticsSetup, Scenario)
from physics.errors import ConfigError, ParameterError
from physics.jones import standard_sop
from physics.params import (FieldParams, MaterialParams, PhysicalParams, SphereParams, TimingParams,
                            magnon_period)

logger = getLogger(__name__)

DATA_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data")
DEFAULT_CONFIG_FILE = os.path.join(DATA_DIR, "default_config.json")

DEFAULT_SEED = 20240611

DEFAULT_CONFIG: Dict[str, Any] = {
    "configuration": "perpendicular",
    "material": {"Q_s": 1e-4, "n_0": 2.19, "lambda_0_nm": 1550.0, "l_A": 0.5},
    "sphere": {"R_s_um": 100.0, "M_s": 140e3},
    "field": {"f_m_GHz": 3.0, "gamma_e_GHz_per_T": 28.0, "ife_enhancement": 1.0},
    "timing": {"t1": 0.0, "delta_t": 0.0, "n_F": 1.47, "t_p": 100e-15},
    "coupler": {"splitting_ratio": 0.5},
    "optics": {"input_sop": "H", "theta": 0.0, "phi": 0.0,
               "theta_m1": 0.0, "phi_m1": 0.0, "theta_m2": 0.0, "phi_m2": 0.0},
    "magnon": {"alpha_re": 0.0, "alpha_im": 0.0, "alpha_i_mag": None, "alpha_i_phase": 0.0},
    "sweep": None,
    "collapse_d": 0.0,
    "oracle": False,
    "fock_dim": None,
    "seed": DEFAULT_SEED,
    "output": {"path": None, "format": "csv"},
}

# Keys within a block that describe the same quantity; a user value for one
# option replaces the defaults of the others.
ALTERNATIVES: Dict[str, List[List[Tuple[str, ...]]]] = {
    "material": [[("lambda_0",), ("lambda_0_nm",)]],
    "sphere": [[("R_s",), ("R_s_um",)]],
    "field": [[("omega_m",), ("f_m_GHz",), ("H_dc",)],
              [("gamma_e",), ("gamma_e_GHz_per_T",)]],
    "timing": [[("t2",), ("delta_t",), ("delta_t_periods",)]],
    "coupler": [[("t_mag", "r_mag"), ("splitting_ratio",)]],
}

BLOCK_KEYS: Dict[str, Tuple[str, ...]] = {
    "material": ("Q_s", "n_0", "lambda_0", "lambda_0_nm", "l_A"),
    "sphere": ("R_s", "R_s_um", "M_s"),
    "field": ("omega_m", "f_m_GHz", "H_dc", "gamma_e", "gamma_e_GHz_per_T", "mu_0", "ife_enhancement"),
    "timing": ("t1", "t2", "delta_t", "delta_t_periods", "n_F", "t_p"),
    "coupler": ("t_mag", "r_mag", "splitting_ratio", "phase"),
    "optics": ("input_sop", "theta", "phi", "theta_m1", "phi_m1", "theta_m2", "phi_m2"),
    "magnon": ("alpha_re", "alpha_im", "alpha_i_mag", "alpha_i_phase"),
    "output": ("path", "format"),
}
SCALAR_KEYS = ("configuration", "sweep", "collapse_d", "oracle", "fock_dim", "seed")

# Paths a sweep axis may drive
ALLOWED_PATHS = frozenset(
    [f"{block}.{key}" for block, keys in BLOCK_KEYS.items() if block != "output"
     for key in keys if key != "input_sop"]
    + ["collapse_d"]
)

OUTPUT_FORMATS = ("csv", "json")
SWEEP_SCALES = ("linear", "log")
MAX_SWEEP_AXES = 2


@dataclass(frozen=True)
class SweepAxis:
    path: str
    start: float
    stop: float
    count: int
    scale: str = "linear"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.count)
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axes: Tuple[SweepAxis, ...]
    parallel: bool = True


@dataclass(frozen=True)
class OutputSpec:
    path: Optional[str] = None
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    configuration: Configuration
    raw: Dict[str, Any]
    scenario: Scenario
    sweep: Optional[SweepSpec] = None
    collapse_d: float = 0.0
    oracle: bool = False
    fock_dim: Optional[int] = None
    seed: int = DEFAULT_SEED
    output: OutputSpec = field(default_factory=OutputSpec)
    source: str = "<defaults>"

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        """Apply CLI overrides (oracle, fock_dim, seed, output_path, output_format)."""
        raw = copy.deepcopy(self.raw)
        for key in ("oracle", "fock_dim", "seed"):
            if overrides.get(key) is not None:
                raw[key] = overrides[key]
        output = raw["output"] = raw.get("output") or {}
        if overrides.get("output_path") is not None:
            output["path"] = overrides["output_path"]
        if overrides.get("output_format") is not None:
            output["format"] = overrides["output_format"]
        return config_from_dict(raw, source=self.source, merge_defaults=False)


def default_config(configuration: Optional[str] = None) -> Dict[str, Any]:
    """A fresh copy of the defaults, optionally for the given configuration."""
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if configuration is not None:
        cfg["configuration"] = configuration
    return cfg


def load_default_config() -> Dict[str, Any]:
    """Defaults from data/default_config.json, falling back to the built-in copy."""
    if os.path.exists(DEFAULT_CONFIG_FILE):
        try:
            with open(DEFAULT_CONFIG_FILE, "r") as f:
                return json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"could not read {DEFAULT_CONFIG_FILE} ({e}); using built-in defaults")
    return default_config()


def _drop_alternatives(block_name: str, block: Dict[str, Any], chosen: List[str]) -> None:
    for options in ALTERNATIVES.get(block_name, []):
        picked = [opt for opt in options if any(k in chosen for k in opt)]
        if not picked:
            continue
        for opt in options:
            if opt in picked:
                continue
            for k in opt:
                block.pop(k, None)


def _merge(defaults: Dict[str, Any], user: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(defaults)
    for key, value in user.items():
        if key in BLOCK_KEYS and value is None:
            # null block: keep the defaults
            continue
        if key in BLOCK_KEYS and isinstance(value, dict) and isinstance(merged.get(key), dict):
            block = merged[key]
            _drop_alternatives(key, block, list(value))
            block.update(copy.deepcopy(value))
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def set_path(raw: Dict[str, Any], path: str, value: Any) -> None:
    """Set ``block.key`` (or a top-level scalar) in a merged config dict."""
    if path not in ALLOWED_PATHS:
        raise ConfigError(f"unknown parameter path '{path}'", field_path="sweep")
    if "." not in path:
        raw[path] = value
        return
    block_name, key = path.split(".", 1)
    block = raw.setdefault(block_name, {})
    if block_name == "coupler" and key in ("t_mag", "r_mag"):
        # sweeping one amplitude fixes the other
        other = "r_mag" if key == "t_mag" else "t_mag"
        block.pop("splitting_ratio", None)
        block[other] = math.sqrt(max(0.0, 1.0 - value * value))
    _drop_alternatives(block_name, block, [key])
    block[key] = value


def _check_keys(data: Dict[str, Any]) -> None:
    for key, value in data.items():
        if key in SCALAR_KEYS:
            continue
        if key not in BLOCK_KEYS:
            raise ConfigError("unknown key", field_path=key)
        if value is None:
            continue
        if not isinstance(value, dict):
            raise ConfigError("expected an object", field_path=key)
        for sub in value:
            if sub not in BLOCK_KEYS[key]:
                raise ConfigError("unknown key", field_path=f"{key}.{sub}")


def _number(block: Dict[str, Any], key: str, path: str, default: Any = None) -> Any:
    value = block.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", field_path=f"{path}.{key}")
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {value!r}", field_path=f"{path}.{key}")
    return float(value)


def _build_material(b: Dict[str, Any]) -> MaterialParams:
    lam = _number(b, "lambda_0", "material")
    if lam is None:
        lam = _number(b, "lambda_0_nm", "material", 1550.0) * 1e-9
    return MaterialParams(Q_s=_number(b, "Q_s", "material", 1e-4), n_0=_number(b, "n_0", "material", 2.19),
                          lambda_0=lam, l_A=_number(b, "l_A", "material", 0.5))


def _build_sphere(b: Dict[str, Any]) -> SphereParams:
    r = _number(b, "R_s", "sphere")
    if r is None:
        r = _number(b, "R_s_um", "sphere", 100.0) * 1e-6
    return SphereParams(R_s=r, M_s=_number(b, "M_s", "sphere", 140e3))


def _build_field(b: Dict[str, Any]) -> FieldParams:
    gamma = _number(b, "gamma_e", "field")
    if gamma is None:
        gamma = 2 * math.pi * _number(b, "gamma_e_GHz_per_T", "field", 28.0) * 1e9
    enhancement = _number(b, "ife_enhancement", "field", 1.0)
    mu_0 = _number(b, "mu_0", "field")
    if "H_dc" in b:
        f = FieldParams.from_field(_number(b, "H_dc", "field"), gamma_e=gamma)
        omega = f.omega_m
    else:
        omega = _number(b, "omega_m", "field")
        if omega is None:
            omega = 2 * math.pi * _number(b, "f_m_GHz", "field", 3.0) * 1e9
    kwargs = dict(omega_m=omega, gamma_e=gamma, ife_enhancement=enhancement)
    if mu_0 is not None:
        kwargs["mu_0"] = mu_0
    return FieldParams(**kwargs)


def _build_timing(b: Dict[str, Any], f: FieldParams) -> TimingParams:
    t1 = _number(b, "t1", "timing", 0.0)
    if "t2" in b:
        t2 = _number(b, "t2", "timing")
    elif "delta_t_periods" in b:
        t2 = t1 + _number(b, "delta_t_periods", "timing") * magnon_period(f)
    else:
        t2 = t1 + _number(b, "delta_t", "timing", 0.0)
    return TimingParams(t1=t1, t2=t2, n_F=_number(b, "n_F", "timing", 1.47),
                        t_p=_number(b, "t_p", "timing", 100e-15))


def _build_coupler(b: Dict[str, Any]) -> CouplerParams:
    phase = _number(b, "phase", "coupler", 0.0)
    if "splitting_ratio" in b:
        return CouplerParams.from_splitting(_number(b, "splitting_ratio", "coupler"), phase)
    return CouplerParams(_number(b, "t_mag", "coupler"), _number(b, "r_mag", "coupler"), phase)


def _build_optics(b: Dict[str, Any]) -> OpticsSetup:
    label = b.get("input_sop", "H")
    try:
        standard_sop(label)
    except ParameterError as e:
        raise ConfigError(str(e), field_path="optics.input_sop") from None
    angles = {k: _number(b, k, "optics", 0.0) for k in BLOCK_KEYS["optics"] if k != "input_sop"}
    return OpticsSetup(input_sop=label.strip().upper(), **angles)


def _build_magnon(b: Dict[str, Any]) -> MagnonSetup:
    alpha = complex(_number(b, "alpha_re", "magnon", 0.0), _number(b, "alpha_im", "magnon", 0.0))
    return MagnonSetup(alpha=alpha, alpha_i_mag=_number(b, "alpha_i_mag", "magnon"),
                       alpha_i_phase=_number(b, "alpha_i_phase", "magnon", 0.0))


def _block(raw: Dict[str, Any], name: str, builder, *args):
    try:
        return builder(raw.get(name) or {}, *args)
    except ParameterError as e:
        raise ConfigError(str(e), field_path=name) from None


def build_scenario(raw: Dict[str, Any]) -> Scenario:
    """Validate the parameter blocks of a merged config into a Scenario."""
    name = raw.get("configuration")
    try:
        configuration = Configuration(name)
    except ValueError:
        raise ConfigError(f"must be 'parallel' or 'perpendicular', got {name!r}",
                          field_path="configuration") from None
    material = _block(raw, "material", _build_material)
    sphere = _block(raw, "sphere", _build_sphere)
    fld = _block(raw, "field", _build_field)
    timing = _block(raw, "timing", _build_timing, fld)
    d = _number(raw, "collapse_d", "config", 0.0)
    try:
        collapse = CollapseModel(d)
    except ParameterError as e:
        raise ConfigError(str(e), field_path="collapse_d") from None
    fock_dim = raw.get("fock_dim")
    if fock_dim is not None and (isinstance(fock_dim, bool) or not isinstance(fock_dim, int) or fock_dim < 2):
        raise ConfigError(f"expected an integer >= 2, got {fock_dim!r}", field_path="fock_dim")
    oracle = raw.get("oracle", False)
    if not isinstance(oracle, bool):
        raise ConfigError(f"expected true or false, got {oracle!r}", field_path="oracle")
    return Scenario(
        configuration=configuration,
        params=PhysicalParams(material=material, sphere=sphere, field=fld, timing=timing),
        coupler=_block(raw, "coupler", _build_coupler),
        optics=_block(raw, "optics", _build_optics),
        magnon=_block(raw, "magnon", _build_magnon),
        collapse=collapse,
        oracle=oracle,
        fock_dim=fock_dim,
    )


def _parse_sweep(spec: Any) -> Optional[SweepSpec]:
    if spec is None:
        return None
    if not isinstance(spec, dict):
        raise ConfigError("expected an object", field_path="sweep")
    axes_raw = spec.get("axes")
    if not isinstance(axes_raw, list) or not axes_raw:
        raise ConfigError("expected a non-empty list of axes", field_path="sweep.axes")
    if len(axes_raw) > MAX_SWEEP_AXES:
        raise ConfigError(f"at most {MAX_SWEEP_AXES} nested axes are supported", field_path="sweep.axes")
    axes = []
    for i, a in enumerate(axes_raw):
        where = f"sweep.axes[{i}]"
        if not isinstance(a, dict):
            raise ConfigError("expected an object", field_path=where)
        path = a.get("path")
        if path not in ALLOWED_PATHS:
            raise ConfigError(f"unknown parameter path {path!r}", field_path=f"{where}.path")
        count = a.get("count")
        if isinstance(count, bool) or not isinstance(count, int) or count < 2:
            raise ConfigError(f"count must be an integer >= 2, got {count!r}", field_path=f"{where}.count")
        scale = a.get("scale", "linear")
        if scale not in SWEEP_SCALES:
            raise ConfigError(f"scale must be one of {SWEEP_SCALES}, got {scale!r}", field_path=f"{where}.scale")
        start = _number(a, "start", where)
        stop = _number(a, "stop", where)
        if start is None or stop is None:
            raise ConfigError("start and stop are required", field_path=where)
        if scale == "log" and (start <= 0 or stop <= 0):
            raise ConfigError("log axes need positive start and stop", field_path=where)
        axes.append(SweepAxis(path=path, start=start, stop=stop, count=count, scale=scale))
    paths = [a.path for a in axes]
    if len(set(paths)) != len(paths):
        raise ConfigError("an axis path may appear only once", field_path="sweep.axes")
    parallel = spec.get("parallel", True)
    if not isinstance(parallel, bool):
        raise ConfigError(f"expected true or false, got {parallel!r}", field_path="sweep.parallel")
    return SweepSpec(axes=tuple(axes), parallel=parallel)


def _parse_output(spec: Dict[str, Any]) -> OutputSpec:
    fmt = spec.get("format", "csv")
    if fmt not in OUTPUT_FORMATS:
        raise ConfigError(f"format must be one of {OUTPUT_FORMATS}, got {fmt!r}", field_path="output.format")
    path = spec.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError(f"expected a string, got {path!r}", field_path="output.path")
    return OutputSpec(path=path, format=fmt)


def config_from_dict(data: Dict[str, Any], source: str = "<dict>",
                     merge_defaults: bool = True) -> ExperimentConfig:
    """Merge ``data`` over the defaults and validate it."""
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object", field_path=source)
    if "configuration" not in data:
        raise ConfigError("required key missing", field_path="configuration")
    _check_keys(data)
    raw = _merge(load_default_config(), data) if merge_defaults else copy.deepcopy(data)
    scenario = build_scenario(raw)
    sweep = _parse_sweep(raw.get("sweep"))
    if sweep is not None:
        # validate every corner of the sweep up front
        for axis in sweep.axes:
            for value in (axis.start, axis.stop):
                corner = copy.deepcopy(raw)
                set_path(corner, axis.path, value)
                build_scenario(corner)
    seed = raw.get("seed", DEFAULT_SEED)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ConfigError(f"expected an integer, got {seed!r}", field_path="seed")
    return ExperimentConfig(
        configuration=scenario.configuration,
        raw=raw,
        scenario=scenario,
        sweep=sweep,
        collapse_d=scenario.collapse.d,
        oracle=scenario.oracle,
        fock_dim=scenario.fock_dim,
        seed=seed,
        output=_parse_output(raw.get("output") or {}),
        source=source,
    )


def parse_config(path) -> ExperimentConfig:
    """Load and validate a JSON experiment config."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        with open(p, "r", encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    except OSError as e:
        raise ConfigError(f"cannot read config file {p}: {e}") from None
    cfg = config_from_dict(data, source=str(p))
    logger.info(f"loaded {cfg.configuration.value} config from {p}")
    return cfg


def scenario_at(cfg: ExperimentConfig, assignments: Dict[str, float]) -> Scenario:
    """Scenario with the sweep axis values in ``assignments`` applied."""
    if not assignments:
        return cfg.scenario
    raw = copy.deepcopy(cfg.raw)
    for path, value in assignments.items():
        set_path(raw, path, float(value))
    return build_scenario(raw)
