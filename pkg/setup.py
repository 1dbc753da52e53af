"""Build script: compiles the optional Cython kernels when a toolchain is
available, and falls back to the pure-numpy implementations otherwise.

The package is fully functional without the extension; hgcalc.backend picks
whichever is importable at runtime.
"""

import os
import sys

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("HGCALC_NO_EXT") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "hgcalc._kernels",
                    ["src/hgcalc/_kernels.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # no cython / no compiler: install pure-python
        print(f"hgcalc: skipping compiled kernels ({exc})", file=sys.stderr)
        ext_modules = []

setup(ext_modules=ext_modules)
