"""Build script for the optional compiled integrator kernel.

The package is fully functional without the extension (a numpy fallback is
selected at import time), so a failed extension build degrades to a
pure-Python install instead of aborting.
"""

import os

from setuptools import Extension, setup


def _extensions():
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "bvpkit._kernel._rk4",
        ["src/bvpkit/_kernel/_rk4.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


if os.environ.get("BVP_SKIP_EXT"):
    setup()
else:
    try:
        setup(ext_modules=_extensions())
    except SystemExit:
        # toolchain unavailable: install pure-Python only
        setup()
