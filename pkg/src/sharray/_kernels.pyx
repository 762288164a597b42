# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled simulator kernels; same contracts as ``_kernels_py``.

Complex arrays are handled as float64 (re, im) data so the inner loops
are plain real multiply-adds. Where rows are independent the outer loop
runs in parallel (OpenMP) without changing results.
"""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange
from libc.math cimport cos, sin, M_PI

cnp.import_array()


cdef inline double[:, ::1] _as_real2(a):
    return np.ascontiguousarray(a, dtype=np.complex128).view(np.float64)


cdef inline double[:, :, ::1] _as_real3(a):
    return np.ascontiguousarray(a, dtype=np.complex128).view(np.float64)


def mix_combine(lo_in, x_in):
    cdef double[:, ::1] lo = _as_real2(lo_in)
    cdef double[:, :, ::1] x = _as_real3(x_in)
    cdef Py_ssize_t T = x.shape[0], N = x.shape[1], L2 = x.shape[2]
    if lo.shape[0] != N or lo.shape[1] != L2:
        raise ValueError("lo and x shapes disagree")
    out = np.zeros((T, L2 // 2), dtype=np.complex128)
    cdef double[:, ::1] y = out.view(np.float64)
    cdef Py_ssize_t t, n, l
    cdef double ar, ai, br, bi
    for t in prange(T, nogil=True, schedule="static"):
        for n in range(N):
            for l in range(0, L2, 2):
                ar = lo[n, l]
                ai = lo[n, l + 1]
                br = x[t, n, l]
                bi = x[t, n, l + 1]
                y[t, l] += ar * br - ai * bi
                y[t, l + 1] += ar * bi + ai * br
    return out


def band_mix_combine(lo_in, coeffs_in, basis_in):
    cdef double[:, ::1] lo = _as_real2(lo_in)
    cdef double[:, :, ::1] c = _as_real3(coeffs_in)
    cdef double[:, ::1] basis = _as_real2(basis_in)
    cdef Py_ssize_t T = c.shape[0], N = c.shape[1], B = c.shape[2] // 2
    cdef Py_ssize_t L2 = basis.shape[1], L = L2 // 2
    if lo.shape[0] != N or lo.shape[1] != L2 or basis.shape[0] != B:
        raise ValueError("input shapes disagree")
    out = np.zeros((T, L), dtype=np.complex128)
    cdef double[:, ::1] y = out.view(np.float64)
    # split re/im planes give unit-stride inner loops
    cdef double[:, ::1] lo_re = np.ascontiguousarray(lo[:, 0::2])
    cdef double[:, ::1] lo_im = np.ascontiguousarray(lo[:, 1::2])
    cdef double[:, ::1] bs_re = np.ascontiguousarray(basis[:, 0::2])
    cdef double[:, ::1] bs_im = np.ascontiguousarray(basis[:, 1::2])
    cdef double[::1] acc_re = np.empty(L)
    cdef double[::1] acc_im = np.empty(L)
    cdef double[::1] x_re = np.empty(L)
    cdef double[::1] x_im = np.empty(L)
    cdef Py_ssize_t t, n, b, l
    cdef double cr, ci, er, ei, sr, si
    with nogil:
        for t in range(T):
            for l in range(L):
                acc_re[l] = 0.0
                acc_im[l] = 0.0
            for n in range(N):
                cr = c[t, n, 0]
                ci = c[t, n, 1]
                for l in range(L):
                    x_re[l] = cr * bs_re[0, l] - ci * bs_im[0, l]
                    x_im[l] = cr * bs_im[0, l] + ci * bs_re[0, l]
                for b in range(1, B):
                    cr = c[t, n, 2 * b]
                    ci = c[t, n, 2 * b + 1]
                    for l in range(L):
                        x_re[l] += cr * bs_re[b, l] - ci * bs_im[b, l]
                        x_im[l] += cr * bs_im[b, l] + ci * bs_re[b, l]
                for l in range(L):
                    er = lo_re[n, l]
                    ei = lo_im[n, l]
                    sr = x_re[l]
                    si = x_im[l]
                    acc_re[l] += er * sr - ei * si
                    acc_im[l] += er * si + ei * sr
            for l in range(L):
                y[t, 2 * l] = acc_re[l]
                y[t, 2 * l + 1] = acc_im[l]
    return out


def dft_bins(y_in, bins_in):
    y_arr = np.ascontiguousarray(y_in, dtype=np.complex128)
    lead = y_arr.shape[:y_arr.ndim - 1]
    cdef Py_ssize_t L = y_arr.shape[y_arr.ndim - 1]
    cdef double[:, ::1] y = y_arr.reshape(-1, L).view(np.float64)
    cdef long long[::1] bins = np.ascontiguousarray(bins_in, dtype=np.int64)
    cdef Py_ssize_t R = y.shape[0], K = bins.shape[0]
    cdef Py_ssize_t r, k, l
    cdef long long step, idx
    cdef double inv = 1.0 / L, sr, si, wr, wi, vr, vi
    cdef double[::1] cw = np.empty(L)
    cdef double[::1] sw = np.empty(L)
    # twiddles from the exact integer index keep large k*l accurate
    for l in range(L):
        cw[l] = cos(-2.0 * M_PI * l / L)
        sw[l] = sin(-2.0 * M_PI * l / L)
    out = np.empty((R, K), dtype=np.complex128)
    cdef double[:, ::1] res = out.view(np.float64)
    for r in prange(R, nogil=True, schedule="static"):
        for k in range(K):
            step = bins[k] % L
            if step < 0:
                step = step + L
            sr = 0.0
            si = 0.0
            idx = 0
            for l in range(L):
                wr = cw[idx]
                wi = sw[idx]
                vr = y[r, 2 * l]
                vi = y[r, 2 * l + 1]
                sr = sr + vr * wr - vi * wi
                si = si + vr * wi + vi * wr
                idx = idx + step
                if idx >= L:
                    idx = idx - L
            res[r, 2 * k] = sr * inv
            res[r, 2 * k + 1] = si * inv
    return out.reshape(lead + (K,))


def dft_rowbins(y_in, bins_in):
    cdef double[:, ::1] y = _as_real2(y_in)
    cdef long long[::1] bins = np.ascontiguousarray(bins_in, dtype=np.int64)
    cdef Py_ssize_t R = y.shape[0], L = y.shape[1] // 2
    if bins.shape[0] != R:
        raise ValueError("need one bin per row")
    cdef Py_ssize_t r, l
    cdef long long step, idx
    cdef double inv = 1.0 / L, sr, si, wr, wi, vr, vi
    cdef double[::1] cw = np.empty(L)
    cdef double[::1] sw = np.empty(L)
    for l in range(L):
        cw[l] = cos(-2.0 * M_PI * l / L)
        sw[l] = sin(-2.0 * M_PI * l / L)
    out = np.empty(R, dtype=np.complex128)
    cdef double[::1] res = out.view(np.float64)
    for r in prange(R, nogil=True, schedule="static"):
        step = bins[r] % L
        if step < 0:
            step = step + L
        sr = 0.0
        si = 0.0
        idx = 0
        for l in range(L):
            wr = cw[idx]
            wi = sw[idx]
            vr = y[r, 2 * l]
            vi = y[r, 2 * l + 1]
            sr = sr + vr * wr - vi * wi
            si = si + vr * wi + vi * wr
            idx = idx + step
            if idx >= L:
                idx = idx - L
        res[2 * r] = sr * inv
        res[2 * r + 1] = si * inv
    return out
