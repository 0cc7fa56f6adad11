"""Numpy implementation of the per-frame tracker recursion.

Mirrors ``_kernel.pyx`` output for output; used when the compiled module is
unavailable or disabled via ``DABRADAR_PURE_PYTHON``.
"""

import numpy as np

from ..numerology import ALPHABET
from . import ops


def run_tracker(y, prs, alpha, noise_var, window=1, direct=False):
    """Run the recursion over one frame.

    Returns ``(q_hat, symbols, h_tr, h_sen, k_gain, g_gain, eta)``; the last
    three are shaped [K, M-1], the CSI and symbol arrays [K, M].
    """
    y = np.ascontiguousarray(y, dtype=np.complex128)
    prs = np.ascontiguousarray(prs, dtype=np.complex128)
    n_tones, n_sym = y.shape
    q_hat = np.zeros((n_tones, n_sym - 1), dtype=np.int8)
    symbols = np.empty((n_tones, n_sym), dtype=np.complex128)
    h_tr = np.empty_like(symbols)
    h_sen = np.empty_like(symbols)
    k_gain = np.empty((n_tones, n_sym - 1))
    g_gain = np.empty_like(k_gain)
    eta = np.empty_like(k_gain)

    symbols[:, 0] = prs
    h_tr[:, 0] = y[:, 0] / prs
    h_sen[:, 0] = h_tr[:, 0]
    idx = np.arange(n_tones)

    for m in range(1, n_sym):
        prev = h_tr[:, m - 1]
        h_pred = ops.smooth(prev, alpha)
        sp = ops.prediction_variance(prev, h_pred, window)
        se = noise_var + sp
        r = ops.transition_residuals(y[:, m], h_pred, symbols[:, m - 1])
        q = np.argmin(r, axis=1)
        x_hat = symbols[:, m - 1] * ALPHABET[q]
        z = y[:, m] / x_hat
        post = ops.posteriors(r, se)
        sz = ops.observation_variance(post, q, h_pred, noise_var)
        e = np.clip((post[idx, q] - 0.25) / 0.75, 0.0, 1.0)
        if direct:
            kk = np.ones(n_tones)
            gg = kk
            ht = z
            hs = z
        else:
            ht, kk, _ = ops.lmmse_update(h_pred, z, sp, sz)
            gg = kk + e * (1.0 - kk)
            hs = h_pred + gg * (z - h_pred)
        q_hat[:, m - 1] = q
        symbols[:, m] = x_hat
        h_tr[:, m] = ht
        h_sen[:, m] = hs
        k_gain[:, m - 1] = kk
        g_gain[:, m - 1] = gg
        eta[:, m - 1] = e
    return q_hat, symbols, h_tr, h_sen, k_gain, g_gain, eta
