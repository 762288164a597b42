"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback. Set ``SHARRAY_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("SHARRAY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

mix_combine = _impl.mix_combine
band_mix_combine = _impl.band_mix_combine
dft_bins = _impl.dft_bins
dft_rowbins = _impl.dft_rowbins

__all__ = ["BACKEND", "mix_combine", "band_mix_combine", "dft_bins", "dft_rowbins"]
