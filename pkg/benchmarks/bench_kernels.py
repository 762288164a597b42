"""Compare the compiled and numpy kernel backends on simulator-sized inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import sys
import time

import numpy as np

from sharray import _kernels_py

try:
    from sharray import _kernels as _compiled
except ImportError:
    _compiled = None

from sharray import ArchitectureConfig, SimParams, make_comb, make_square, measure_gains


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_cases(rng):
    # 16 channels, 2048 samples, batches of 256 trials: the Monte-Carlo inner loop
    lo = crandn(rng, 16, 2048)
    x = crandn(rng, 8, 16, 2048)
    z = crandn(rng, 256, 16, 3)
    basis = crandn(rng, 3, 2048)
    y = crandn(rng, 16, 2048)
    bins = np.arange(-64, 65) * 4
    rows = crandn(rng, 129, 2048)
    return {
        "mix_combine (8x16x2048)": lambda k: k.mix_combine(lo, x),
        "band_mix_combine (256x16x2048)": lambda k: k.band_mix_combine(lo, z, basis),
        "dft_bins (16x2048, 129 bins)": lambda k: k.dft_bins(y, bins),
        "dft_rowbins (129x2048)": lambda k: k.dft_rowbins(rows, bins),
    }


def end_to_end(impl, trials):
    """measure_gains on a 16-channel TMA with the given backend patched in."""
    from sharray import kernels
    saved = {n: getattr(kernels, n) for n in ("mix_combine", "band_mix_combine", "dft_bins", "dft_rowbins")}
    for n in saved:
        setattr(kernels, n, getattr(impl, n))
    try:
        cfg = ArchitectureConfig("tma", 16, make_square(1 / 16, f_hm=1e9), f_bw=5e8)
        t0 = time.perf_counter()
        measure_gains(cfg, None, SimParams(noise_psd=1.0), trials=trials)
        return time.perf_counter() - t0
    finally:
        for n, f in saved.items():
            setattr(kernels, n, f)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--trials", type=int, default=2000, help="Monte-Carlo trials for the end-to-end run")
    ap.add_argument("--json", help="also write results here")
    args = ap.parse_args(argv)

    backends = {"numpy": _kernels_py}
    if _compiled is not None:
        backends["cython"] = _compiled
    else:
        print("compiled extension not built; timing numpy only", file=sys.stderr)

    rng = np.random.default_rng(0)
    results = []
    for name, fn in kernel_cases(rng).items():
        row = {"case": name}
        for b, impl in backends.items():
            row[b] = best_of(lambda: fn(impl), args.repeat)
        results.append(row)
    row = {"case": f"measure_gains TMA N=16 ({args.trials} trials)"}
    for b, impl in backends.items():
        row[b] = end_to_end(impl, args.trials)
    results.append(row)

    width = max(len(r["case"]) for r in results)
    print(f"{'case':<{width}}  {'numpy ms':>10}  {'cython ms':>10}  {'speedup':>8}")
    for r in results:
        c = r.get("cython")
        speed = f"{r['numpy'] / c:7.2f}x" if c else "     n/a"
        cy = f"{1e3 * c:10.2f}" if c else f"{'n/a':>10}"
        print(f"{r['case']:<{width}}  {1e3 * r['numpy']:10.2f}  {cy}  {speed}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
