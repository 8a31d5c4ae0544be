"""Build script: compiles the stencil extension when Cython is available.

The package works without the extension (a numpy fallback is selected at
import time); the compiled core is only a speedup for the hot kernels.
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "capabench._kernels._stencil",
                ["src/capabench/_kernels/_stencil.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
