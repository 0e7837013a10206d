import os

from setuptools import Extension, setup

# The compiled kernel is optional: without Cython (or with AVGSHADOW_NO_EXT=1)
# the package installs pure and avgshadow.backend falls back to the numpy
# implementation at import time.
ext_modules = []
if os.environ.get("AVGSHADOW_NO_EXT") != "1":
    try:
        import numpy as np
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "avgshadow._core",
                    ["src/avgshadow/_core.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
