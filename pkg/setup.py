"""Build script: compiles the chain kernel extension when Cython is available.

The package works without the extension (a NumPy fallback is selected at
import time), so the build degrades gracefully instead of failing.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "shrinklab._core._chain",
                ["src/shrinklab/_core/_chain.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
