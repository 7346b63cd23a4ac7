"""Experiment configuration: TOML files, schema validation, presets."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .markov import LRUParams
from .optimize import OptimizerConfig
from .params import TWO_PI, DeviceParams, DrivePulse, ScheduleParams

# section -> key -> (type, default); None default means required-if-section-used
_SCHEMA = {
    "device": {
        "f_q_hz": (float, 6.7e9),
        "f_r_hz": (float, 7.8e9),
        "anharmonicity_hz": (float, -300e6),
        "coupling_hz": (float, 135e6),
        "kappa_hz": (float, 10e6),
        "nbar": (float, 0.005),
        "t1_transmon_s": (float, 30e-6),
        "t2_transmon_s": (float, 30e-6),
        "t2_resonator_s": (float, None),
        "n_transmon": (int, 6),
        "n_resonator": (int, 3),
    },
    "drive": {
        "amplitude_hz": (float, 204e6),
        "f_d_hz": (float, 5.2464e9),
        "phase_rad": (float, 0.0),
        "t_rise_s": (float, 30e-9),
        "t_p_s": (float, 178.6e-9),
        "amplitude_list_hz": (list, None),
        "long_drive": (bool, False),
    },
    "optimizer": {
        "t_rise_s": (float, 30e-9),
        "t_slot_s": (float, 440e-9),
        "amplitude_min_hz": (float, 0.0),
        "amplitude_max_hz": (float, 500e6),
        "f_d_min_hz": (float, 5.19e9),
        "f_d_max_hz": (float, 5.26e9),
        "sample_budget": (int, 144),
        "tp_tolerance_s": (float, 0.1e-9),
        "grid_amplitude": (int, 12),
        "grid_f_d": (int, 12),
        "refine_radius_hz": (float, 2e6),
        "p2_threshold": (float, 0.01),
        "with_coherences": (bool, True),
    },
    "zz": {
        "zeta_max_hz": (float, 2e6),
        "n_points": (int, 9),
        "include_critical": (bool, True),
    },
    "markov": {
        "l1": (float, 0.005),
        "l2": (float, None),
        "cycles": (int, 20),
        "runs": (int, 20000),
        "r": (float, 0.95),
        "l1_lru": (float, 0.0025),
        "pm22": (float, 0.90),
        "pm11": (float, 0.995),
        "r_list": (list, None),
        "pm22_list": (list, None),
        "use_data_lru": (bool, True),
        "use_ancilla_lru": (bool, True),
        "t_c_s": (float, 800e-9),
    },
    "run": {
        "seed": (int, 1),
        "output_dir": (str, "out"),
        "threads": (int, 1),
    },
}

PRESETS = {
    "table1": {"device": {}},  # schema defaults are the table-1 device
    "table2": {"markov": {"t_c_s": 800e-9}},
    "fig4": {
        "markov": {
            "l1": 0.005,
            "r": 0.95,
            "l1_lru": 0.0025,
            "pm22": 0.90,
            "pm11": 0.995,
        }
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment inputs with physical objects attached."""

    raw: dict
    device: DeviceParams
    drive: DrivePulse
    optimizer: OptimizerConfig
    lru: LRUParams
    schedule: ScheduleParams
    seed: int
    output_dir: Path
    threads: int

    def section(self, name: str) -> dict:
        return self.raw.get(name, {})


def _validate(raw: dict) -> dict:
    out = {}
    for section, content in raw.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(content, dict):
            raise ConfigError(f"section [{section}] must be a table")
        sect_schema = _SCHEMA[section]
        merged = {}
        for key, value in content.items():
            if key not in sect_schema:
                raise ConfigError(f"unknown key '{section}.{key}'")
            want, _ = sect_schema[key]
            if want is float and isinstance(value, int):
                value = float(value)
            if want is list:
                if not isinstance(value, list):
                    raise ConfigError(f"'{section}.{key}' must be a list")
            elif not isinstance(value, want) or (
                want is not bool and isinstance(value, bool)
            ):
                raise ConfigError(
                    f"'{section}.{key}' must be {want.__name__}, got "
                    f"{type(value).__name__}"
                )
            merged[key] = value
        out[section] = merged
    return out


def _with_defaults(raw: dict) -> dict:
    full = {}
    for section, sect_schema in _SCHEMA.items():
        merged = {}
        for key, (_, default) in sect_schema.items():
            if default is not None:
                merged[key] = default
        merged.update(raw.get(section, {}))
        full[section] = merged
    return full


def _merge(base: dict, extra: dict) -> dict:
    out = {k: dict(v) for k, v in base.items()}
    for section, content in extra.items():
        out.setdefault(section, {}).update(content)
    return out


def load_config(
    path: str | Path | None = None,
    preset: str | None = None,
    overrides: dict | None = None,
) -> ExperimentConfig:
    """Parse and validate a TOML config, applying preset and CLI overrides."""
    raw: dict = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(
                f"unknown preset '{preset}' (have: {', '.join(sorted(PRESETS))})"
            )
        raw = _merge(raw, PRESETS[preset])
    if path is not None:
        text = Path(path).read_bytes()
        try:
            parsed = tomllib.loads(text.decode())
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        raw = _merge(raw, _validate(parsed))
    if overrides:
        raw = _merge(raw, overrides)
    raw = _validate(raw)
    full = _with_defaults(raw)

    dev = full["device"]
    kappa = TWO_PI * dev["kappa_hz"]
    t2_res = dev.get("t2_resonator_s")
    if t2_res is None:
        t2_res = 2.0 / kappa
    try:
        device = DeviceParams.from_hz(
            f_q=dev["f_q_hz"],
            f_r=dev["f_r_hz"],
            anh=dev["anharmonicity_hz"],
            g=dev["coupling_hz"],
            kappa=dev["kappa_hz"],
            nbar=dev["nbar"],
            T1_q=dev["t1_transmon_s"],
            T2_q=dev["t2_transmon_s"],
            T2_r=t2_res,
            n_transmon=dev["n_transmon"],
            n_resonator=dev["n_resonator"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [device]: {exc}") from exc

    drv = full["drive"]
    try:
        drive = DrivePulse.from_hz(
            amp_hz=drv["amplitude_hz"],
            f_d=drv["f_d_hz"],
            phi=drv["phase_rad"],
            t_rise=drv["t_rise_s"],
            t_p=drv["t_p_s"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [drive]: {exc}") from exc

    opt = full["optimizer"]
    try:
        optimizer = OptimizerConfig(
            t_rise=opt["t_rise_s"],
            T_slot=opt["t_slot_s"],
            Omega_range=(
                TWO_PI * opt["amplitude_min_hz"],
                TWO_PI * opt["amplitude_max_hz"],
            ),
            omega_d_range=(TWO_PI * opt["f_d_min_hz"], TWO_PI * opt["f_d_max_hz"]),
            sample_budget=opt["sample_budget"],
            tp_tolerance=opt["tp_tolerance_s"],
            initial_grid=(opt["grid_amplitude"], opt["grid_f_d"]),
            refine_radius=TWO_PI * opt["refine_radius_hz"],
            with_coherences=opt["with_coherences"],
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [optimizer]: {exc}") from exc

    mk = full["markov"]
    try:
        lru = LRUParams(
            R=mk["r"], L1_LRU=mk["l1_lru"], pM22=mk["pm22"], pM11=mk["pm11"]
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [markov]: {exc}") from exc

    run = full["run"]
    if run["threads"] < 1:
        raise ConfigError("run.threads must be >= 1")
    return ExperimentConfig(
        raw=full,
        device=device,
        drive=drive,
        optimizer=optimizer,
        lru=lru,
        schedule=ScheduleParams(t_c=mk["t_c_s"]),
        seed=run["seed"],
        output_dir=Path(run["output_dir"]),
        threads=run["threads"],
    )
