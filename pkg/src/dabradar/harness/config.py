"""Flat YAML experiment configuration.

Every key is listed in ``SCHEMA`` with its type, default and meaning;
unknown keys are rejected so stale config files fail loudly.
"""

from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from ..estimators import Scheme

EXPERIMENTS = ("snr_sweep", "alpha_sweep", "representative_scene", "random_scenes",
               "unit_oracles")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment_id: str = "snr_sweep"
    seed: int = 20240601
    trials: int = 50
    threads: int = 1
    output_dir: str = "results"
    schemes: list = field(default_factory=lambda: [s.value for s in Scheme])
    snr_grid_db: list = field(default_factory=lambda: [0.0, 5.0, 10.0, 15.0, 20.0])
    include_noiseless: bool = False
    alpha: float = 0.15
    alpha_grid: list = field(default_factory=lambda: [0.0, 0.05, 0.1, 0.15, 0.2, 0.3])
    smooth_window: int = 1
    # numerology
    null_len: int = 2656
    frames: int = 1
    # scene
    carrier_hz: float = 202.928e6
    bistatic_scale: float = 2.0
    direct_gain_db: float = 0.0
    multipath_delays: list = field(default_factory=lambda: [8.0, 21.0])
    multipath_gains_db: list = field(default_factory=lambda: [-10.0, -14.0])
    target_delays: list = field(default_factory=lambda: [90.0])
    target_velocities: list = field(default_factory=lambda: [120.0])
    target_gains_db: list = field(default_factory=lambda: [-26.0])
    fading_depth_db: float = 20.0
    fading_depths_db: list = field(default_factory=lambda: [20.0, 40.0])
    representative_gain_db: float = -26.0
    # range-Doppler map
    window: str = "hann"
    doppler_bins: int = 0
    doppler_span_hz: float = 0.0
    guard_range: int = 2
    guard_doppler: int = 2
    guard_dc: int = 2
    window_range: int = 38
    window_doppler: int = 26
    save_maps: bool = True

    def validate(self):
        if self.experiment_id not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment_id!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not self.snr_grid_db or not self.alpha_grid or not self.schemes:
            raise ConfigError("grids and scheme list must be non-empty")
        for s in self.schemes:
            try:
                Scheme(s)
            except ValueError:
                raise ConfigError(f"unknown scheme {s!r}") from None
        for a in list(self.alpha_grid) + [self.alpha]:
            if not 0.0 <= a < 1.0:
                raise ConfigError(f"alpha {a} outside [0, 1)")
        if len(self.multipath_delays) != len(self.multipath_gains_db):
            raise ConfigError("multipath_delays and multipath_gains_db differ in length")
        if not (len(self.target_delays) == len(self.target_velocities)
                == len(self.target_gains_db)):
            raise ConfigError("target_* lists must have equal length")
        if not 1.0 <= self.bistatic_scale <= 2.0:
            raise ConfigError("bistatic_scale must lie in [1, 2]")
        if self.frames < 1:
            raise ConfigError("frames must be >= 1")
        if self.window not in ("hann", "rect"):
            raise ConfigError("window must be 'hann' or 'rect'")
        if self.fading_depth_db < 0 or any(d < 0 for d in self.fading_depths_db):
            raise ConfigError("fading depths must be non-negative")
        return self


SCHEMA = {f.name: f.type for f in fields(ExperimentConfig)}


def _coerce(key, value, kind):
    try:
        if kind in (int, "int"):
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            return int(value)
        if kind in (float, "float"):
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if kind in (bool, "bool"):
            if not isinstance(value, bool):
                raise ValueError
            return value
        if kind in (str, "str"):
            return str(value)
        if kind in (list, "list"):
            if not isinstance(value, (list, tuple)):
                raise ValueError
            return list(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None
    return value


def from_mapping(data: dict, **overrides) -> ExperimentConfig:
    data = dict(data or {})
    data.update({k: v for k, v in overrides.items() if v is not None})
    unknown = sorted(set(data) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    values = {k: _coerce(k, v, SCHEMA[k]) for k, v in data.items()}
    return ExperimentConfig(**values).validate()


def load_config(path, **overrides) -> ExperimentConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return from_mapping(data, **overrides)


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump({f.name: getattr(cfg, f.name) for f in fields(cfg)}, sort_keys=False)
