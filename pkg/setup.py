import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "embednoise._kernels._sa_cy",
                ["src/embednoise/_kernels/_sa_cy.pyx"],
                include_dirs=[np.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-python kernel is selected at import time when the extension is absent.
    ext_modules = []

setup(ext_modules=ext_modules)
