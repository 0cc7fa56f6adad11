"""Range-Doppler map formation from sensing CSI.

Pipeline: active tones -> full FFT grid -> unitary IDFT (CIR) -> slow-time
difference inside each frame -> Doppler sum on the exact slow-time grid.
"""

import csv
import struct
from dataclasses import dataclass

import numpy as np

from .numerology import MODE_I, SPEED_OF_LIGHT, SubcarrierGrid, active_indices


@dataclass
class RangeDopplerMap:
    values: np.ndarray  # [n_range, n_doppler]
    range_bins: np.ndarray
    doppler_hz: np.ndarray
    window_id: str = "hann"
    sample_rate: float = MODE_I.sample_rate

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def range_m(self) -> np.ndarray:
        return SPEED_OF_LIGHT * self.range_bins / self.sample_rate

    def doppler_index(self, nu: float) -> int:
        return int(np.argmin(np.abs(self.doppler_hz - nu)))

    def range_index(self, r: int) -> int:
        hits = np.flatnonzero(self.range_bins == r)
        if hits.size == 0:
            raise ValueError(f"range bin {r} not in map")
        return int(hits[0])

    def peak(self):
        """(range_bin, doppler_hz) of the strongest cell."""
        i, j = np.unravel_index(np.argmax(self.power), self.values.shape)
        return int(self.range_bins[i]), float(self.doppler_hz[j])


def embed_full_grid(h_active, grid: SubcarrierGrid = MODE_I) -> np.ndarray:
    """Scatter active-tone values (along axis 0) onto FFT bins k mod N."""
    h_active = np.asarray(h_active, dtype=complex)
    if h_active.shape[0] != grid.active_count:
        raise ValueError("first axis must run over the active tones")
    full = np.zeros((grid.fft_size,) + h_active.shape[1:], dtype=complex)
    full[np.mod(active_indices(grid), grid.fft_size)] = h_active
    return full


def csi_to_cir(full_grid) -> np.ndarray:
    """Unitary inverse DFT along axis 0."""
    return np.fft.ifft(np.asarray(full_grid), axis=0, norm="ortho")


def slow_time_difference(cir_stack) -> np.ndarray:
    """First difference along slow time within each frame.

    ``cir_stack`` is [..., frames, M]; the result is [..., frames, M-1].
    Frames are never differenced across the null symbol.
    """
    cir_stack = np.asarray(cir_stack)
    if cir_stack.shape[-1] < 2:
        raise ValueError("need at least two useful symbols per frame")
    return cir_stack[..., 1:] - cir_stack[..., :-1]


def default_doppler_grid(frames: int, grid: SubcarrierGrid = MODE_I, span_hz: float = None,
                         n_bins: int = None) -> np.ndarray:
    """Symmetric Doppler grid.

    Defaults: span +-1/(2 T_sym) (the unambiguous symbol-rate Doppler) with
    spacing equal to the coherent resolution 1/(frames*T_fr); the bin count
    is rounded up to odd so 0 Hz is a grid point.
    """
    if span_hz is None:
        span_hz = 0.5 / grid.symbol_duration
    if n_bins is None:
        step = 1.0 / (frames * grid.frame_duration)
        n_bins = 2 * int(np.ceil(span_hz / step)) + 1
    if n_bins < 1:
        raise ValueError("empty Doppler grid")
    return np.linspace(-span_hz, span_hz, n_bins) if n_bins > 1 else np.zeros(1)


def taper(n_frames: int, n_slow: int, kind: str = "hann") -> np.ndarray:
    """Slow-time weights over the full record, shaped [frames, n_slow]."""
    n = n_frames * n_slow
    if kind == "rect":
        w = np.ones(n)
    elif kind == "hann":
        w = np.hanning(n + 2)[1:-1]  # strictly positive end points
    else:
        raise ValueError(f"unknown window {kind!r}")
    return w.reshape(n_frames, n_slow)


def form_map(diff_stack, times, doppler_grid, window=None, range_set=None,
             window_id: str = "custom", sample_rate: float = MODE_I.sample_rate) -> RangeDopplerMap:
    """Direct-sum Doppler transform on a possibly nonuniform time grid.

    ``diff_stack`` is [n_range_total, frames, n_slow] (delay bins first),
    ``times`` is [frames, n_slow]. ``range_set`` selects delay rows.
    """
    doppler_grid = np.atleast_1d(np.asarray(doppler_grid, dtype=float))
    if doppler_grid.size == 0:
        raise ValueError("empty Doppler grid")
    diff_stack = np.asarray(diff_stack)
    times = np.asarray(times, dtype=float)
    if diff_stack.shape[1:] != times.shape:
        raise ValueError("times must match the slow-time layout of the stack")
    if range_set is None:
        range_set = np.arange(diff_stack.shape[0])
    range_set = np.asarray(range_set)
    w = np.ones(times.shape) if window is None else np.asarray(window, dtype=float)
    x = (diff_stack[range_set] * w).reshape(range_set.size, -1)
    steer = np.exp(-2j * np.pi * np.outer(times.ravel(), doppler_grid))
    return RangeDopplerMap(x @ steer, range_set, doppler_grid, window_id, sample_rate)


def range_doppler_map(sensing_csi, grid: SubcarrierGrid = MODE_I, doppler_grid=None,
                      window: str = "hann", range_set=None) -> RangeDopplerMap:
    """Full pipeline from stacked sensing CSI [frames, active_count, M]."""
    csi = np.asarray(sensing_csi)
    if csi.ndim == 2:
        csi = csi[None]
    n_frames, _, n_sym = csi.shape
    full = embed_full_grid(np.moveaxis(csi, 1, 0), grid)  # [N, frames, M]
    cir = csi_to_cir(full)
    diff = slow_time_difference(cir)
    # differenced sample m-1 pairs with symbols (m-1, m); index it from t_{0,f}
    times = (np.arange(n_frames)[:, None] * grid.frame_duration
             + np.arange(n_sym - 1)[None, :] * grid.symbol_duration)
    if doppler_grid is None:
        doppler_grid = default_doppler_grid(n_frames, grid)
    if range_set is None:
        range_set = np.arange(grid.cp_len)
    w = taper(n_frames, n_sym - 1, window)
    return form_map(diff, times, doppler_grid, w, range_set, window, grid.sample_rate)


def write_map_csv(rdm: RangeDopplerMap, path) -> None:
    """Rows of (range_bin, doppler_hz, power, phase_rad)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh)
        wr.writerow(["range_bin", "doppler_hz", "power", "phase_rad"])
        for i, r in enumerate(rdm.range_bins):
            for j, nu in enumerate(rdm.doppler_hz):
                v = rdm.values[i, j]
                wr.writerow([int(r), repr(float(nu)), repr(float(abs(v) ** 2)),
                             repr(float(np.angle(v)))])


def write_map_binary(rdm: RangeDopplerMap, path) -> None:
    """Little-endian: uint32 rows, uint32 cols, then row-major complex64 (re, im) pairs."""
    vals = np.ascontiguousarray(rdm.values, dtype="<c8")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", *vals.shape))
        fh.write(vals.tobytes())


def read_map_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        rows, cols = struct.unpack("<II", fh.read(8))
        data = np.frombuffer(fh.read(), dtype="<c8")
    if data.size != rows * cols:
        raise ValueError("truncated map file")
    return data.reshape(rows, cols)
