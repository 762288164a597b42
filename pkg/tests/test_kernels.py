import numpy as np
import pytest

from sharray import _kernels_py, kernels

try:
    from sharray import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

BACKENDS = [pytest.param(_kernels_py, id="python"),
            pytest.param(_compiled, id="cython",
                         marks=pytest.mark.skipif(_compiled is None, reason="extension not built"))]


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


@pytest.mark.parametrize("impl", BACKENDS)
def test_mix_combine(impl, rng):
    lo, x = crandn(rng, 5, 64), crandn(rng, 3, 5, 64)
    ref = np.array([sum(lo[n] * x[t, n] for n in range(5)) for t in range(3)])
    np.testing.assert_allclose(impl.mix_combine(lo, x), ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_band_mix_combine(impl, rng):
    lo, z, basis = crandn(rng, 4, 32), crandn(rng, 6, 4, 3), crandn(rng, 3, 32)
    ref = np.einsum("nl,tnl->tl", lo, np.einsum("tnb,bl->tnl", z, basis))
    np.testing.assert_allclose(impl.band_mix_combine(lo, z, basis), ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
@pytest.mark.parametrize("shape", [(128,), (3, 128), (2, 3, 128)])
def test_dft_bins_matches_fft(impl, shape, rng):
    y = crandn(rng, *shape)
    bins = np.array([0, 1, 5, -3, 127, 300, -1000])
    ref = (np.fft.fft(y, axis=-1) / 128)[..., np.mod(bins, 128)]
    np.testing.assert_allclose(impl.dft_bins(y, bins), ref, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize("impl", BACKENDS)
def test_dft_rowbins(impl, rng):
    y = crandn(rng, 6, 64)
    bins = np.array([0, 3, -5, 64, 70, -200])
    full = np.fft.fft(y, axis=-1) / 64
    ref = full[np.arange(6), np.mod(bins, 64)]
    np.testing.assert_allclose(impl.dft_rowbins(y, bins), ref, rtol=1e-9, atol=1e-12)


@pytest.mark.skipif(_compiled is None, reason="extension not built")
def test_backends_agree(rng):
    lo, x = crandn(rng, 8, 256), crandn(rng, 2, 8, 256)
    np.testing.assert_allclose(_compiled.mix_combine(lo, x), _kernels_py.mix_combine(lo, x), rtol=1e-12)
    z, basis = crandn(rng, 2, 8, 5), crandn(rng, 5, 256)
    np.testing.assert_allclose(_compiled.band_mix_combine(lo, z, basis),
                               _kernels_py.band_mix_combine(lo, z, basis), rtol=1e-11, atol=1e-12)


def test_selected_backend():
    assert kernels.BACKEND in ("cython", "python")
    if _compiled is not None and kernels.BACKEND == "cython":
        assert kernels.mix_combine is _compiled.mix_combine
