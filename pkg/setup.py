"""Builds the optional compiled kernels; the package works without them."""

import os

from setuptools import setup

ext_modules = []
# OpenMP parallelizes the per-trial loops; SHARRAY_NO_OPENMP=1 builds them serial
_openmp = [] if os.environ.get("SHARRAY_NO_OPENMP", "") == "1" else ["-fopenmp"]
if os.environ.get("SHARRAY_NO_EXT", "") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension("sharray._kernels", ["src/sharray/_kernels.pyx"],
                       include_dirs=[np.get_include()],
                       define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                       extra_compile_args=["-O3"] + _openmp,
                       extra_link_args=_openmp)],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
