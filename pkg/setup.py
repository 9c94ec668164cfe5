import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "holonome._core._kernels",
        ["src/holonome/_core/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        # -fcx-limited-range: inline complex multiplies as mul/add without the
        # C99 inf/nan recovery branch, which otherwise blocks vectorization
        extra_compile_args=["-O3", "-fcx-limited-range"],
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}),
)
