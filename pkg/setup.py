"""Build script for the compiled force-evaluation kernel.

The package works without the extension (a pure-Python fallback is
selected at import time), but the compiled kernel is what makes large
optimization runs fast.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# The compiled kernel must round exactly like the pure-Python fallback:
# -ffp-contract=off forbids fused multiply-add contraction, and the
# -fno-builtin-sin/-cos pair stops GCC from fusing sin+cos calls into
# glibc's sincos, which rounds differently from separate calls about
# 0.1% of the time.
extensions = [
    Extension(
        "sceneopt._kernel._core",
        ["src/sceneopt/_kernel/_core.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-ffp-contract=off", "-fno-builtin-sin", "-fno-builtin-cos"],
    )
]

setup(ext_modules=cythonize(extensions, language_level="3"))
