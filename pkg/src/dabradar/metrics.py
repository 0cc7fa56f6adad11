"""Symbol, CSI and range-Doppler map quality metrics."""

from dataclasses import dataclass

import numpy as np

DB_FLOOR = -300.0
DB_CAP = 300.0


@dataclass(frozen=True)
class RegionSpec:
    """Target-anchored evaluation regions on a map, in grid bins.

    ``target_bin`` is (range row, Doppler column), ``dc_bin`` the zero-Doppler
    column. Guards define the mainlobe, windows the local support.
    """

    target_bin: tuple
    dc_bin: int
    guard_range: int = 2
    guard_doppler: int = 2
    window_range: int = 38
    window_doppler: int = 26
    guard_dc: int = 2

    def __post_init__(self):
        if self.guard_range > self.window_range or self.guard_doppler > self.window_doppler:
            raise ValueError("guards must not exceed the evaluation window")


def _db(ratio, scale=10.0):
    if ratio <= 0:
        return DB_FLOOR
    if not np.isfinite(ratio):
        return DB_CAP
    return float(np.clip(scale * np.log10(ratio), DB_FLOOR, DB_CAP))


def snap_to_alphabet(x) -> np.ndarray:
    """Project unit-modulus symbols onto the nearest pi/4-multiple phase."""
    x = np.asarray(x)
    return np.exp(1j * np.pi / 4 * np.round(np.angle(x) / (np.pi / 4)))


def symbol_errors(est, truth, tol: float = 1e-9) -> np.ndarray:
    """Boolean error mask over m >= 1 (PRS column excluded)."""
    est = np.asarray(est)
    truth = np.asarray(truth)
    if est.shape != truth.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {truth.shape}")
    return np.abs(snap_to_alphabet(est[..., 1:]) - snap_to_alphabet(truth[..., 1:])) > tol


def symbol_error_rate(est, truth) -> float:
    """Fraction of post-PRS cells where the reconstructed symbol is wrong.

    Accepts symbol matrices [K, M] or stacks [..., K, M].
    """
    return float(np.mean(symbol_errors(est, truth)))


def nmse_db(est, truth) -> float:
    est = np.asarray(est)
    truth = np.asarray(truth)
    if est.shape != truth.shape:
        raise ValueError(f"shape mismatch {est.shape} vs {truth.shape}")
    ref = np.sum(np.abs(truth) ** 2)
    if ref <= 0:
        raise ValueError("truth has zero power")
    return _db(np.sum(np.abs(est - truth) ** 2) / ref)


def _masks(shape, region: RegionSpec):
    n_r, n_d = shape
    r0, l0 = region.target_bin
    dr = np.abs(np.arange(n_r) - r0)[:, None]
    dl = np.abs(np.arange(n_d) - l0)[None, :]
    ddc = np.abs(np.arange(n_d) - region.dc_bin)[None, :]
    main = (dr <= region.guard_range) & (dl <= region.guard_doppler)
    win = (dr <= region.window_range) & (dl <= region.window_doppler)
    zero = np.broadcast_to(ddc <= region.guard_dc, shape)
    return main, win, zero


def tbr_db(power_map, region: RegionSpec) -> float:
    """Mainlobe peak power over mean local background power."""
    power_map = np.asarray(power_map, dtype=float)
    main, win, zero = _masks(power_map.shape, region)
    background = win & ~(main | zero)
    if not background.any():
        raise ValueError("empty background region")
    if not main.any():
        raise ValueError("target outside map")
    return _db(power_map[main].max() / power_map[background].mean())


def _focus(peak, sidelobes):
    if sidelobes.size == 0:
        raise ValueError("empty sidelobe set")
    rms = np.sqrt(np.mean(sidelobes ** 2))
    if rms == 0:
        return DB_CAP if peak > 0 else 0.0
    return _db(peak / rms, 20.0)


def range_focus_db(power_map, region: RegionSpec) -> float:
    """Peak amplitude over RMS of the range-cut sidelobes."""
    amp = np.sqrt(np.asarray(power_map, dtype=float))
    n_r, n_d = amp.shape
    r0, l0 = region.target_bin
    main, _, _ = _masks(amp.shape, region)
    lo, hi = max(l0 - region.guard_doppler, 0), min(l0 + region.guard_doppler + 1, n_d)
    cut = amp[:, lo:hi].max(axis=1)
    dr = np.abs(np.arange(n_r) - r0)
    side = (dr <= region.window_range) & (dr > region.guard_range)
    return _focus(amp[main].max(), cut[side])


def doppler_focus_db(power_map, region: RegionSpec) -> float:
    """Peak amplitude over RMS of the Doppler-cut sidelobes, DC guard excluded."""
    amp = np.sqrt(np.asarray(power_map, dtype=float))
    n_r, n_d = amp.shape
    r0, l0 = region.target_bin
    main, _, _ = _masks(amp.shape, region)
    lo, hi = max(r0 - region.guard_range, 0), min(r0 + region.guard_range + 1, n_r)
    cut = amp[lo:hi, :].max(axis=0)
    dl = np.abs(np.arange(n_d) - l0)
    ddc = np.abs(np.arange(n_d) - region.dc_bin)
    side = (dl <= region.window_doppler) & (dl > region.guard_doppler) & (ddc > region.guard_dc)
    return _focus(amp[main].max(), cut[side])


def average_gains(tracking_gain, sensing_gain):
    """Arithmetic means of the tracking and sensing gain traces."""
    return float(np.mean(tracking_gain)), float(np.mean(sensing_gain))


__all__ = ["RegionSpec", "symbol_error_rate", "symbol_errors", "nmse_db", "tbr_db",
           "range_focus_db", "doppler_focus_db", "average_gains", "snap_to_alphabet"]
