# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-frame tracker recursion; same contract as ``_kernel_py``."""

import numpy as np
from libc.math cimport exp, M_PI, cos, sin

ctypedef double complex cplx


cdef inline double abs2(cplx v) nogil:
    return v.real * v.real + v.imag * v.imag


def run_tracker(y, prs, double alpha, double noise_var, int window=1, bint direct=False):
    # symbol-major internally so the tone loop walks contiguous memory
    cdef cplx[:, ::1] Y = np.ascontiguousarray(np.asarray(y, dtype=np.complex128).T)
    cdef cplx[::1] P = np.ascontiguousarray(prs, dtype=np.complex128)
    # PRS anchor with numpy division so it is bit-identical to Y_0 / X_prs
    cdef cplx[::1] H0 = np.ascontiguousarray(np.asarray(y, dtype=np.complex128)[:, 0] / np.asarray(P))
    cdef Py_ssize_t n = Y.shape[1]
    cdef Py_ssize_t n_sym = Y.shape[0]

    q_hat_a = np.zeros((n_sym - 1, n), dtype=np.int8)
    symbols_a = np.empty((n_sym, n), dtype=np.complex128)
    h_tr_a = np.empty((n_sym, n), dtype=np.complex128)
    h_sen_a = np.empty((n_sym, n), dtype=np.complex128)
    k_a = np.empty((n_sym - 1, n), dtype=np.float64)
    g_a = np.empty((n_sym - 1, n), dtype=np.float64)
    eta_a = np.empty((n_sym - 1, n), dtype=np.float64)

    cdef signed char[:, ::1] q_hat = q_hat_a
    cdef cplx[:, ::1] sym = symbols_a
    cdef cplx[:, ::1] htr = h_tr_a
    cdef cplx[:, ::1] hsen = h_sen_a
    cdef double[:, ::1] kg = k_a
    cdef double[:, ::1] gg = g_a
    cdef double[:, ::1] et = eta_a

    cdef cplx[::1] pred = np.empty(n, dtype=np.complex128)
    cdef double[::1] raw = np.empty(n, dtype=np.float64)
    cdef double[::1] csum = np.empty(n + 1, dtype=np.float64)
    cdef cplx alph[4]
    cdef double amb[4]
    cdef double r[4]
    cdef double w[4]
    cdef Py_ssize_t k, m, lo, hi, j
    cdef int q, best
    cdef double sp, se, rmin, wsum, sz, psel, e, K, G
    cdef cplx a, x_hat, z, nb

    for j in range(4):
        alph[j] = cos(M_PI / 4 + j * M_PI / 2) + 1j * sin(M_PI / 4 + j * M_PI / 2)
        amb[j] = abs2(alph[j] / alph[0] - 1.0)

    with nogil:
        for k in range(n):
            sym[0, k] = P[k]
            htr[0, k] = H0[k]
            hsen[0, k] = htr[0, k]

        for m in range(1, n_sym):
            # prediction and its raw squared step
            for k in range(n):
                if alpha == 0.0 or n < 2:
                    pred[k] = htr[m - 1, k]
                else:
                    if k == 0:
                        nb = htr[m - 1, 1]
                    elif k == n - 1:
                        nb = htr[m - 1, n - 2]
                    else:
                        nb = 0.5 * (htr[m - 1, k - 1] + htr[m - 1, k + 1])
                    pred[k] = (1.0 - alpha) * htr[m - 1, k] + alpha * nb
                raw[k] = abs2(htr[m - 1, k] - pred[k])
            csum[0] = 0.0
            for k in range(n):
                csum[k + 1] = csum[k] + raw[k]

            for k in range(n):
                if window > 0 and n >= 2:
                    lo = k - window if k >= window else 0
                    hi = k + window + 1 if k + window + 1 <= n else n
                    sp = (csum[hi] - csum[lo]) / (hi - lo)
                else:
                    sp = raw[k]
                se = noise_var + sp

                a = pred[k] * sym[m - 1, k]
                best = 0
                for q in range(4):
                    r[q] = abs2(Y[m, k] - a * alph[q])
                    if r[q] < r[best]:
                        best = q
                rmin = r[best]
                x_hat = sym[m - 1, k] * alph[best]
                z = Y[m, k] / x_hat

                wsum = 0.0
                for q in range(4):
                    if q == best:
                        w[q] = 1.0
                    elif se > 0:
                        w[q] = exp(-(r[q] - rmin) / se)
                    else:
                        w[q] = 1.0 if r[q] == rmin else 0.0
                    wsum += w[q]
                sz = 0.0
                for q in range(4):
                    w[q] /= wsum
                    sz += w[q] * amb[(q - best + 4) % 4]
                sz = noise_var + abs2(pred[k]) * sz
                psel = w[best]
                e = (psel - 0.25) / 0.75
                if e < 0.0:
                    e = 0.0
                elif e > 1.0:
                    e = 1.0

                if direct:
                    K = 1.0
                    G = 1.0
                    htr[m, k] = z
                    hsen[m, k] = z
                else:
                    if sp + sz > 0:
                        K = sp / (sp + sz)
                    else:
                        K = 0.0
                    G = K + e * (1.0 - K)
                    htr[m, k] = pred[k] + K * (z - pred[k])
                    hsen[m, k] = pred[k] + G * (z - pred[k])

                q_hat[m - 1, k] = best
                sym[m, k] = x_hat
                kg[m - 1, k] = K
                gg[m - 1, k] = G
                et[m - 1, k] = e

    return (q_hat_a.T.copy(), symbols_a.T.copy(), h_tr_a.T.copy(), h_sen_a.T.copy(),
            k_a.T.copy(), g_a.T.copy(), eta_a.T.copy())
