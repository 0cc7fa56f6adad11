"""DAB+ Mode-I numerology, transition alphabet and differential encoding.

Everything here works on post-FFT active-subcarrier values; there is no
time-domain OFDM modulation in this package.
"""

from dataclasses import dataclass

import numpy as np

# Differential pi/4-QPSK transitions e^{j(pi/4 + q pi/2)}, q = 0..3.
ALPHABET = np.exp(1j * (np.pi / 4 + np.arange(4) * np.pi / 2))

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SubcarrierGrid:
    fft_size: int = 2048
    cp_len: int = 504
    active_count: int = 1536
    sample_rate: float = 2.048e6
    subcarrier_spacing: float = 1000.0
    useful_symbols_per_frame: int = 76
    null_len: int = 2656

    def __post_init__(self):
        if self.active_count % 2 or self.active_count >= self.fft_size:
            raise ValueError("active_count must be even and smaller than fft_size")
        if not np.isclose(self.subcarrier_spacing * self.fft_size, self.sample_rate):
            raise ValueError("subcarrier_spacing * fft_size must equal sample_rate")
        if self.useful_symbols_per_frame < 1:
            raise ValueError("need at least the PRS symbol")

    @property
    def half_width(self) -> int:
        return self.active_count // 2

    @property
    def symbol_duration(self) -> float:
        """Useful symbol plus cyclic prefix, in seconds."""
        return (self.fft_size + self.cp_len) / self.sample_rate

    @property
    def frame_duration(self) -> float:
        return (self.useful_symbols_per_frame * self.symbol_duration
                + self.null_len / self.sample_rate)


MODE_I = SubcarrierGrid()


@dataclass
class SymbolGrid:
    """One frame of unit-modulus symbols.

    ``symbols[:, 0]`` is the PRS, ``transitions[:, m-1]`` holds the alphabet
    index carrying symbol m-1 to symbol m.
    """

    prs: np.ndarray
    symbols: np.ndarray
    transitions: np.ndarray


def active_indices(grid: SubcarrierGrid = MODE_I) -> np.ndarray:
    """Signed active subcarrier indices in ascending order, DC excluded."""
    half = grid.half_width
    return np.concatenate([np.arange(-half, 0), np.arange(1, half + 1)])


def map_active_to_fft_bin(k, fft_size: int = MODE_I.fft_size,
                          half_width: int = MODE_I.half_width):
    """Map signed active index (scalar or array) to its FFT bin ``k mod fft_size``."""
    k_arr = np.asarray(k)
    if np.any(k_arr == 0) or np.any(np.abs(k_arr) > half_width):
        raise ValueError(f"index outside the active set: {k}")
    out = np.mod(k_arr, fft_size)
    return int(out) if out.ndim == 0 else out


def random_prs(rng: np.random.Generator, grid: SubcarrierGrid = MODE_I) -> np.ndarray:
    return ALPHABET[rng.integers(0, 4, size=grid.active_count)]


def random_transitions(rng: np.random.Generator, grid: SubcarrierGrid = MODE_I) -> np.ndarray:
    shape = (grid.active_count, grid.useful_symbols_per_frame - 1)
    return rng.integers(0, 4, size=shape).astype(np.int8)


def encode_frame(prs, transitions) -> SymbolGrid:
    """Differentially encode a frame starting from the PRS anchor."""
    prs = np.asarray(prs, dtype=complex)
    transitions = np.asarray(transitions, dtype=np.int8)
    if transitions.ndim != 2 or transitions.shape[0] != prs.shape[0]:
        raise ValueError("transitions must be shaped [active_count, M-1]")
    if np.max(np.abs(np.abs(prs) - 1.0), initial=0.0) > 1e-9:
        raise ValueError("PRS must be unit modulus on every tone")
    if transitions.size and (transitions.min() < 0 or transitions.max() > 3):
        raise ValueError("transition indices must lie in 0..3")

    # Accumulate phase as an integer count of pi/4 steps so long frames do
    # not drift in modulus.
    steps = np.cumsum(2 * transitions.astype(np.int64) + 1, axis=1) % 8
    rot = np.exp(1j * np.pi / 4 * steps)
    symbols = np.empty((prs.shape[0], transitions.shape[1] + 1), dtype=complex)
    symbols[:, 0] = prs
    symbols[:, 1:] = prs[:, None] * rot
    return SymbolGrid(prs=prs, symbols=symbols, transitions=transitions)


def nearest_transition(ratio) -> np.ndarray:
    """Alphabet index whose phase is closest to ``angle(ratio)``."""
    ang = np.angle(ratio) - np.pi / 4
    return (np.round(ang / (np.pi / 2)).astype(np.int64) % 4).astype(np.int8)


def decode_transitions(symbols) -> np.ndarray:
    """Recover transition indices from consecutive-symbol ratios."""
    symbols = np.asarray(symbols)
    return nearest_transition(symbols[:, 1:] * np.conj(symbols[:, :-1]))


def slow_time(m, f, grid: SubcarrierGrid = MODE_I):
    """Slow time ``f*T_fr + m*T_sym`` of useful symbol m in frame f."""
    m_arr = np.asarray(m)
    if np.any(m_arr < 0) or np.any(m_arr >= grid.useful_symbols_per_frame):
        raise ValueError("symbol index out of range")
    return f * grid.frame_duration + m * grid.symbol_duration


def slow_time_grid(frames: int, grid: SubcarrierGrid = MODE_I, start: int = 0) -> np.ndarray:
    """Times t[f, m] for m = start..M-1 of each frame."""
    m = np.arange(start, grid.useful_symbols_per_frame)
    f = np.arange(frames)[:, None]
    return f * grid.frame_duration + m[None, :] * grid.symbol_duration
