"""The four CSI estimation schemes compared in the benchmarks."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ..numerology import ALPHABET, SymbolGrid, nearest_transition
from . import _backend


class Scheme(str, Enum):
    OPEN_LOOP = "open_loop"
    MAP_DIRECT = "map_direct"
    POSTERIOR_A0 = "posterior_a0"
    PROPOSED = "proposed"


@dataclass
class EstimatorOutput:
    scheme: Scheme
    recon: SymbolGrid
    tracking_csi: np.ndarray
    sensing_csi: np.ndarray
    tracking_gain: np.ndarray
    sensing_gain: np.ndarray
    reliability: np.ndarray


def _check_frame(y_frame, prs):
    y_frame = np.asarray(y_frame, dtype=complex)
    prs = np.asarray(prs, dtype=complex)
    if y_frame.ndim != 2 or y_frame.shape[0] != prs.shape[0] or y_frame.shape[1] < 1:
        raise ValueError(f"frame shape {y_frame.shape} does not match PRS length {prs.shape}")
    return y_frame, prs


def _from_kernel(scheme, out):
    q_hat, symbols, h_tr, h_sen, k_gain, g_gain, eta = out
    return EstimatorOutput(scheme, SymbolGrid(symbols[:, 0].copy(), symbols, q_hat),
                           h_tr, h_sen, k_gain, g_gain, eta)


def track_frame(y_frame, prs, alpha: float = 0.15, noise_var: float = 0.0,
                smooth_window: int = 1, backend=None) -> EstimatorOutput:
    """Posterior-aware tracker over one frame, producing tracking and sensing CSI."""
    y_frame, prs = _check_frame(y_frame, prs)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if noise_var < 0:
        raise ValueError("noise_var must be non-negative")
    kernel = _backend.get_kernel(backend)
    out = kernel(y_frame, prs, float(alpha), float(noise_var), int(smooth_window), False)
    scheme = Scheme.PROPOSED if alpha > 0 else Scheme.POSTERIOR_A0
    return _from_kernel(scheme, out)


def map_direct_estimate(y_frame, prs, alpha: float = 0.15, noise_var: float = 0.0,
                        smooth_window: int = 1, backend=None) -> EstimatorOutput:
    """MAP transition detection with the raw observation Z fed back as CSI."""
    y_frame, prs = _check_frame(y_frame, prs)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    kernel = _backend.get_kernel(backend)
    out = kernel(y_frame, prs, float(alpha), float(noise_var), int(smooth_window), True)
    return _from_kernel(Scheme.MAP_DIRECT, out)


def open_loop_estimate(y_frame, prs, forced=None) -> EstimatorOutput:
    """Two-symbol differential detection, symbol chaining and direct division.

    ``forced`` maps ``(tone, m)`` to a transition index that overrides the
    hard decision at that step; it exists to study slip propagation.
    """
    y_frame, prs = _check_frame(y_frame, prs)
    n_tones, n_sym = y_frame.shape
    q_hat = nearest_transition(y_frame[:, 1:] * np.conj(y_frame[:, :-1]))
    for (k, m), q in (forced or {}).items():
        q_hat[k, m - 1] = q
    steps = np.cumsum(2 * q_hat.astype(np.int64) + 1, axis=1) % 8
    symbols = np.empty_like(y_frame)
    symbols[:, 0] = prs
    symbols[:, 1:] = prs[:, None] * np.exp(1j * np.pi / 4 * steps)
    h = y_frame / symbols
    ones = np.ones((n_tones, n_sym - 1))
    return EstimatorOutput(Scheme.OPEN_LOOP, SymbolGrid(prs, symbols, q_hat), h, h.copy(),
                           ones, ones.copy(), ones.copy())


def estimate(scheme, y_frame, prs, alpha: float = 0.15, noise_var: float = 0.0,
             smooth_window: int = 1, backend=None) -> EstimatorOutput:
    """Dispatch one frame to a scheme; ``posterior_a0`` ignores ``alpha``."""
    scheme = Scheme(scheme)
    if scheme is Scheme.OPEN_LOOP:
        return open_loop_estimate(y_frame, prs)
    if scheme is Scheme.MAP_DIRECT:
        return map_direct_estimate(y_frame, prs, alpha, noise_var, smooth_window, backend)
    if scheme is Scheme.POSTERIOR_A0:
        out = track_frame(y_frame, prs, 0.0, noise_var, smooth_window, backend)
    else:
        out = track_frame(y_frame, prs, alpha, noise_var, smooth_window, backend)
        out.scheme = Scheme.PROPOSED
    return out


__all__ = ["ALPHABET", "Scheme", "EstimatorOutput", "track_frame", "map_direct_estimate",
           "open_loop_estimate", "estimate"]
