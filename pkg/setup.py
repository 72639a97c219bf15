"""Build script for the optional compiled mask kernels.

The package works without the extension; ``vbackcheck.core.masks`` falls
back to the numpy implementation when the compiled module is absent.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "vbackcheck.core._kernels",
        sources=["src/vbackcheck/core/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
