"""Numpy implementations of the simulator kernels (fallback backend)."""

import numpy as np


def mix_combine(lo, x):
    """y[t, l] = sum_n lo[n, l] * x[t, n, l]."""
    return np.einsum("nl,tnl->tl", lo, x)


def band_mix_combine(lo, coeffs, basis):
    """Synthesize band-limited inputs, mix with the LOs and combine.

    coeffs[t, n, b] are the spectral coefficients of channel n's input in
    trial t on the tones ``basis[b, :]``; returns y[t, l].
    """
    x = coeffs @ basis                      # (T, N, L)
    return np.einsum("nl,tnl->tl", lo, x)


def dft_bins(y, bins):
    """(1/L) * sum_l y[..., l] * exp(-j*2*pi*k*l/L) for each k in ``bins``."""
    y = np.asarray(y)
    n = y.shape[-1]
    l = np.arange(n)
    # exact integer reduction keeps the twiddle phase accurate for large k*l
    idx = np.mod(np.multiply.outer(l, np.asarray(bins, dtype=np.int64)), n)
    twiddle = np.exp(-2j * np.pi * idx / n)
    return (y @ twiddle) / n


def dft_rowbins(y, bins):
    """(1/L) * sum_l y[r, l] * exp(-j*2*pi*bins[r]*l/L): one bin per row."""
    y = np.asarray(y)
    n = y.shape[-1]
    idx = np.mod(np.multiply.outer(np.asarray(bins, dtype=np.int64), np.arange(n)), n)
    return np.sum(y * np.exp(-2j * np.pi * idx / n), axis=-1) / n
