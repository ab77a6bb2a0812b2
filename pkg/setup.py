"""Build script for the compiled statevector kernels.

The package works without the extension (a pure-numpy fallback is selected
at import time); building it makes trajectory noise simulation and batched
gate application several times faster.
"""

import numpy
from setuptools import setup
from setuptools.extension import Extension

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "pqcfourier._kernels",
                ["src/pqcfourier/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
