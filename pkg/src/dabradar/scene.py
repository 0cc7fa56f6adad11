"""Ground-truth multipath CSI, observations and randomized scenes."""

from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import brentq

from .numerology import (MODE_I, SPEED_OF_LIGHT, SubcarrierGrid, active_indices,
                         slow_time_grid)


@dataclass
class PathSpec:
    """One propagation path.

    ``delay_bins`` is the delay in samples at the grid sample rate, so the
    per-tone phase ramp is ``exp(-2j*pi*k*delay_bins/fft_size)``.
    """

    gain: complex
    delay_bins: float
    doppler_hz: float = 0.0

    def to_dict(self):
        return {"gain_re": float(np.real(self.gain)), "gain_im": float(np.imag(self.gain)),
                "delay_bins": float(self.delay_bins), "doppler_hz": float(self.doppler_hz)}

    @classmethod
    def from_dict(cls, d):
        return cls(complex(d["gain_re"], d["gain_im"]), float(d["delay_bins"]),
                   float(d.get("doppler_hz", 0.0)))


@dataclass
class SceneConfig:
    paths: list
    targets: list = field(default_factory=list)
    noise_var: float = 0.0
    fading_depth_db: float = 0.0
    frames: int = 1
    carrier_hz: float = 202.928e6
    bistatic_scale: float = 2.0
    grid: SubcarrierGrid = MODE_I

    def __post_init__(self):
        if not self.paths:
            raise ValueError("scene needs at least one path")
        if self.noise_var < 0:
            raise ValueError("noise_var must be non-negative")
        if not 1.0 <= self.bistatic_scale <= 2.0:
            raise ValueError("bistatic_scale must lie in [1, 2]")
        if self.fading_depth_db < 0:
            raise ValueError("fading_depth_db must be non-negative")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        for p in list(self.paths) + list(self.targets):
            if not 0 <= p.delay_bins < self.grid.cp_len:
                raise ValueError(f"path delay {p.delay_bins} outside CP support")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz

    def doppler_from_velocity(self, velocity):
        return self.bistatic_scale * np.asarray(velocity) / self.wavelength

    def velocity_from_doppler(self, doppler_hz):
        return self.wavelength * np.asarray(doppler_hz) / self.bistatic_scale

    def to_dict(self):
        d = {k: v for k, v in asdict(self).items() if k not in ("paths", "targets", "grid")}
        d["paths"] = [p.to_dict() for p in self.paths]
        d["targets"] = [p.to_dict() for p in self.targets]
        return d

    @classmethod
    def from_dict(cls, d, grid: SubcarrierGrid = MODE_I):
        d = dict(d)
        paths = [PathSpec.from_dict(p) for p in d.pop("paths")]
        targets = [PathSpec.from_dict(p) for p in d.pop("targets", [])]
        return cls(paths=paths, targets=targets, grid=grid, **d)


def _path_response(paths, t, grid):
    k = active_indices(grid)
    h = np.zeros((k.size,) + np.shape(t), dtype=complex)
    for p in paths:
        ramp = np.exp(-2j * np.pi * k * p.delay_bins / grid.fft_size)
        gain = p.gain * np.exp(2j * np.pi * p.doppler_hz * np.asarray(t))
        h += np.multiply.outer(ramp, gain)
    return h


def synthesize_csi(scene: SceneConfig, m: int, f: int, fading=None) -> np.ndarray:
    """True CSI over the active tones at useful symbol m of frame f.

    ``fading`` (a per-tone complex profile) multiplies the static paths only.
    """
    grid = scene.grid
    t = f * grid.frame_duration + m * grid.symbol_duration
    static = _path_response(scene.paths, t, grid)
    if fading is not None:
        static = static * fading
    return static + _path_response(scene.targets, t, grid)


def synthesize_frame(scene: SceneConfig, f: int, fading=None) -> np.ndarray:
    """True CSI of frame f, shaped [active_count, M]."""
    grid = scene.grid
    t = slow_time_grid(f + 1, grid)[f]
    static = _path_response(scene.paths, t, grid)
    if fading is not None:
        static = static * np.asarray(fading)[:, None]
    return static + _path_response(scene.targets, t, grid)


def observe(h, x, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """Y = H X + W with circular Gaussian W of total variance ``noise_var``."""
    if noise_var < 0:
        raise ValueError("noise_var must be non-negative")
    h = np.asarray(h)
    y = h * np.asarray(x)
    if noise_var > 0:
        w = rng.standard_normal(h.shape + (2,)) @ np.array([1.0, 1j])
        y = y + np.sqrt(noise_var / 2) * w
    return y


def fading_profile(depth_db: float, rng: np.random.Generator, grid: SubcarrierGrid = MODE_I,
                   n_paths: int = 4, max_delay_bins: float = 24.0) -> np.ndarray:
    """Smooth complex frequency profile with an exact max/min magnitude ratio.

    A few random short-delay paths give a ripple ``s`` with max |s| = 1,
    rotated so its peak opposes a unit floor: ``P = 1 + b s``. The ratio
    grows continuously from 1 (b = 0) to unbounded (b = 1, a true notch),
    so ``b`` is solved to hit ``depth_db``. Output has unit RMS.
    """
    if depth_db < 0:
        raise ValueError("depth_db must be non-negative")
    k = active_indices(grid)
    if depth_db == 0:
        return np.ones(k.size, dtype=complex)
    gains = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2)
    delays = rng.uniform(1.0, max_delay_bins, size=n_paths)
    s = np.exp(-2j * np.pi * np.outer(k, delays) / grid.fft_size) @ gains
    peak = np.argmax(np.abs(s))
    s = -s / s[peak]

    def excess(b):
        mag = np.abs(1 + b * s)
        return 20 * np.log10(mag.max() / max(mag.min(), 1e-300)) - depth_db

    b = brentq(excess, 0.0, 1.0, xtol=1e-14)
    prof = 1 + b * s
    return prof / np.sqrt(np.mean(np.abs(prof) ** 2))


def db_gain(db: float, phase: float = 0.0) -> complex:
    return 10 ** (db / 20) * np.exp(1j * phase)


def random_target(rng: np.random.Generator, reference_power: float = 1.0,
                  carrier_hz: float = 202.928e6, bistatic_scale: float = 2.0,
                  delay_range=(55, 220), speed_range=(50.0, 240.0),
                  amp_range_db=(-35.0, -21.0)):
    """Draw one moving target; returns (PathSpec, velocity_m_s).

    Delay is an integer bin so the truth cell in the map is exact.
    """
    delay = int(rng.integers(delay_range[0], delay_range[1] + 1))
    speed = rng.uniform(*speed_range)
    velocity = speed if rng.random() < 0.5 else -speed
    amp_db = rng.uniform(*amp_range_db)
    phase = rng.uniform(0, 2 * np.pi)
    doppler = bistatic_scale * velocity * carrier_hz / SPEED_OF_LIGHT
    gain = np.sqrt(reference_power) * db_gain(amp_db, phase)
    return PathSpec(gain, float(delay), float(doppler)), velocity


def random_scene(rng: np.random.Generator, base: SceneConfig = None) -> SceneConfig:
    """Random single-target scene on top of ``base`` (default: unit direct path).

    Target amplitude is relative to the dominant static component.
    """
    if base is None:
        base = SceneConfig(paths=[PathSpec(1.0, 0.0)])
    ref = max(abs(p.gain) for p in base.paths) ** 2
    target, _ = random_target(rng, ref, base.carrier_hz, base.bistatic_scale)
    return SceneConfig(paths=list(base.paths), targets=[target], noise_var=base.noise_var,
                       fading_depth_db=base.fading_depth_db, frames=base.frames,
                       carrier_hz=base.carrier_hz, bistatic_scale=base.bistatic_scale,
                       grid=base.grid)


def adjacent_tone_bound(paths, grid: SubcarrierGrid = MODE_I) -> float:
    """Upper bound on |H_{k+1} - H_k| from the path delays."""
    return 2 * np.pi * grid.subcarrier_spacing * sum(
        abs(p.gain) * p.delay_bins / grid.sample_rate for p in paths)
