"""Per-symbol building blocks of the posterior-aware CSI tracker.

All functions broadcast over tones: pass scalars for a single tone or
1-D arrays ordered like the active index list.
"""

from typing import NamedTuple

import numpy as np

from ..numerology import ALPHABET

# |Q[q]/Q[q_hat] - 1|^2 indexed by (q - q_hat) mod 4.
AMBIGUITY_DISTANCE = np.abs(ALPHABET / ALPHABET[0] - 1.0) ** 2


class Detection(NamedTuple):
    q_hat: np.ndarray
    residuals: np.ndarray
    degenerate: np.ndarray


class FusionResult(NamedTuple):
    h: np.ndarray
    gain: np.ndarray
    degenerate: np.ndarray


def _check_alpha(alpha):
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")


def smooth(h, alpha: float) -> np.ndarray:
    """Nearest-neighbour frequency smoothing along the active tone list.

    Each tone is pulled toward the mean of its list neighbours (one at each
    end, two inside).
    """
    _check_alpha(alpha)
    h = np.asarray(h, dtype=complex)
    if alpha == 0.0 or h.size < 2:
        return h.copy()
    nb = np.empty_like(h)
    nb[1:-1] = 0.5 * (h[:-2] + h[2:])
    nb[0] = h[1]
    nb[-1] = h[-2]
    return (1.0 - alpha) * h + alpha * nb


def predict(prev_tracked, alpha: float) -> np.ndarray:
    return smooth(prev_tracked, alpha)


def local_mean(v, window: int) -> np.ndarray:
    """Mean over +-window list neighbours, truncated at the ends."""
    v = np.asarray(v, dtype=float)
    if window <= 0 or v.size < 2:
        return v.copy()
    c = np.concatenate([[0.0], np.cumsum(v)])
    idx = np.arange(v.size)
    lo = np.maximum(idx - window, 0)
    hi = np.minimum(idx + window + 1, v.size)
    return (c[hi] - c[lo]) / (hi - lo)


def prediction_variance(prev_tracked, predicted, smooth_window: int = 1) -> np.ndarray:
    """Squared prediction step, optionally averaged over neighbouring tones."""
    raw = np.abs(np.asarray(prev_tracked) - np.asarray(predicted)) ** 2
    return local_mean(raw, smooth_window)


def transition_residuals(y, h_pred, x_prev) -> np.ndarray:
    """|y - h_pred * x_prev * q|^2 for every q, shaped (..., 4)."""
    a = np.asarray(h_pred) * np.asarray(x_prev)
    return np.abs(np.asarray(y)[..., None] - a[..., None] * ALPHABET) ** 2


def map_detect(y, h_pred, x_prev, like_var=None) -> Detection:
    """Prediction-aided MAP transition decision.

    With equal priors and a common variance the MAP rule is the minimum
    residual; ``like_var`` therefore does not affect the decision and is
    accepted only for interface symmetry with :func:`posteriors`. Ties go to
    the lowest alphabet index. A zero prediction makes every residual equal
    and is flagged as degenerate.
    """
    if like_var is not None and np.any(np.asarray(like_var) <= 0):
        raise ValueError("like_var must be positive")
    r = transition_residuals(y, h_pred, x_prev)
    q_hat = np.argmin(r, axis=-1).astype(np.int8)
    degenerate = np.asarray(h_pred) == 0
    return Detection(q_hat, r, degenerate)


def posteriors(residuals, like_var) -> np.ndarray:
    """Normalized exp(-r/like_var), computed relative to the smallest residual.

    ``like_var == 0`` is the hard limit: all mass on the minimum residual,
    split evenly across exact ties.
    """
    r = np.asarray(residuals, dtype=float)
    lv = np.asarray(like_var, dtype=float)[..., None]
    shifted = r - r.min(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        logit = np.where(lv > 0, -shifted / np.where(lv > 0, lv, 1.0),
                         np.where(shifted == 0, 0.0, -np.inf))
    w = np.exp(logit)
    return w / w.sum(axis=-1, keepdims=True)


def observation_variance(post, q_hat, h_pred, noise_var) -> np.ndarray:
    """Noise plus posterior-weighted symbol-ambiguity power of Z = Y / X_hat."""
    post = np.asarray(post, dtype=float)
    q_hat = np.asarray(q_hat)
    offsets = (np.arange(4) - q_hat[..., None]) % 4
    amb = np.sum(post * AMBIGUITY_DISTANCE[offsets], axis=-1)
    return noise_var + np.abs(np.asarray(h_pred)) ** 2 * amb


def lmmse_update(h_pred, z, pred_var, obs_var) -> FusionResult:
    """Scalar LMMSE fusion of prediction and observation.

    If both variances are zero the gain is defined as 0 (keep the
    prediction) and the tone is flagged.
    """
    pred_var = np.asarray(pred_var, dtype=float)
    obs_var = np.asarray(obs_var, dtype=float)
    if np.any(pred_var < 0) or np.any(obs_var < 0):
        raise ValueError("variances must be non-negative")
    total = pred_var + obs_var
    degenerate = total == 0
    gain = np.divide(pred_var, total, out=np.zeros(np.broadcast(pred_var, total).shape),
                     where=~degenerate)
    h_pred = np.asarray(h_pred)
    return FusionResult(h_pred + gain * (np.asarray(z) - h_pred), gain, degenerate)


def reliability(post, q_hat) -> np.ndarray:
    """Concentration of the selected transition, rescaled so uniform -> 0."""
    p_sel = np.take_along_axis(np.asarray(post), np.asarray(q_hat)[..., None].astype(np.intp),
                               axis=-1)[..., 0]
    return np.clip((p_sel - 0.25) / 0.75, 0.0, 1.0)


def sensing_gain(tracking_gain, eta):
    return tracking_gain + eta * (1.0 - tracking_gain)
