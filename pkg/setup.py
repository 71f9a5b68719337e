import os

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # fallback kernels are used at runtime
    cythonize = None

EXT_MODULES = []
if cythonize is not None and not os.environ.get("FVP_NO_EXT"):
    EXT_MODULES = cythonize(
        [
            Extension(
                "parafvp._kernels",
                [os.path.join("src", "parafvp", "_kernels.pyx")],
                include_dirs=[np.get_include()],
            )
        ],
        compiler_directives={"language_level": 3, "embedsignature": True},
    )

setup(ext_modules=EXT_MODULES)
