import os

import numpy as np
from setuptools import Extension, setup

# The compiled kernel is optional: without it the package falls back to the
# pure-Python kernel at import time. Set QDENSE_PURE_PYTHON=1 to skip the build.
ext_modules = []
if not os.environ.get("QDENSE_PURE_PYTHON"):
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "qdense._kernel",
                ["src/qdense/_kernel.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # keep mul+add unfused so the C and Python kernels round alike
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
