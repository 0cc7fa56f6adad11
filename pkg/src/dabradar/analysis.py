"""Closed-form performance predictions for the tracker.

Used as a calculator and as independent oracles for Monte Carlo checks.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc


def q_function(x):
    """Standard normal upper tail, via erfc."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))


def slip_bound(gamma):
    """Union bound 3 Q(sqrt(gamma)) on a DQPSK slip, clamped to 1."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("transition SNR must be non-negative")
    out = np.minimum(1.0, 3.0 * q_function(np.sqrt(gamma)))
    return float(out) if out.ndim == 0 else out


def gamma_proposed(h_pred_pow, noise_var, pred_var):
    """Transition SNR of prediction-aided detection: |H~|^2 / (s0^2 + sp^2)."""
    return h_pred_pow / (noise_var + pred_var)


def gamma_open_loop(h_pow, noise_var, delta_h_var=0.0):
    """Transition SNR of the two-symbol statistic Y_m Y*_{m-1}."""
    return h_pow ** 2 / (2 * h_pow * noise_var + noise_var ** 2 + delta_h_var)


def rho_alpha(alpha):
    """Variance factor of i.i.d. tone errors after one smoothing pass."""
    return (1 - alpha) ** 2 + alpha ** 2 / 2


def pred_mse_gain(alpha, err_var, curvature_pow):
    """MSE reduction of the smoothed one-step predictor over the raw one."""
    return (2 * alpha - 1.5 * alpha ** 2) * err_var - alpha ** 2 / 4 * curvature_pow


def gamma_gain(alpha, noise_var, prev_var, process_var):
    """Transition-SNR gain of smoothing over the unsmoothed predictor."""
    return ((noise_var + prev_var + process_var)
            / (noise_var + rho_alpha(alpha) * prev_var + process_var))


def slip_ratio_bound(alpha, gamma0, noise_var, prev_var, process_var):
    """Approximate slip-rate ratio with/without smoothing, Q-tail based."""
    g = gamma_gain(alpha, noise_var, prev_var, process_var)
    return q_function(np.sqrt(g * gamma0)) / q_function(np.sqrt(gamma0))


def posterior_variance(pred_var, obs_var):
    """Harmonic combination P R / (P + R); zero when either input is zero."""
    pred_var = np.asarray(pred_var, dtype=float)
    obs_var = np.asarray(obs_var, dtype=float)
    total = pred_var + obs_var
    out = np.divide(pred_var * obs_var, total, out=np.zeros(np.broadcast(total).shape),
                    where=total > 0)
    return float(out) if out.ndim == 0 else out


def mse_reduction_factors(pred_var, obs_var):
    """(P+/R, P+/P) = (K, 1 - K)."""
    k = pred_var / (pred_var + obs_var)
    return k, 1 - k


def ambiguity_injection_bound(gain, h_pred_pow, off_mass):
    """Upper bound 4 K^2 |H~|^2 * (off-hypothesis posterior mass)."""
    return 4 * np.asarray(gain) ** 2 * h_pred_pow * off_mass


@dataclass
class TransitionSnrReport:
    gamma_proposed: float
    gamma_open_loop: float
    slip_bound: float
    slip_bound_open_loop: float
    h_pred_pow: float
    noise_var: float
    pred_var: float
    delta_h_var: float

    @classmethod
    def compute(cls, h_pred_pow, noise_var, pred_var=0.0, delta_h_var=0.0):
        gp = gamma_proposed(h_pred_pow, noise_var, pred_var)
        go = gamma_open_loop(h_pred_pow, noise_var, delta_h_var)
        return cls(gp, go, slip_bound(gp), slip_bound(go), h_pred_pow, noise_var, pred_var,
                   delta_h_var)

    def rows(self):
        return [(k, float(v)) for k, v in self.__dict__.items()]
