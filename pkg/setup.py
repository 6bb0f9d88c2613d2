from setuptools import Extension, setup

import numpy as np
from Cython.Build import cythonize

ext_modules = cythonize(
    [
        Extension(
            "compsim._ap_kernel",
            ["src/compsim/_ap_kernel.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
        )
    ],
    language_level=3,
)

setup(ext_modules=ext_modules)
