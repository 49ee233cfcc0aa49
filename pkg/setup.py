"""Build script for the optional compiled kernels.

``pip install .`` (or ``python setup.py build_ext --inplace``) compiles the
Cython extension.  When Cython or a C compiler is unavailable the package
still installs and falls back to the pure-Python kernels at import time.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "sarascan._kernels._core",
                ["src/sarascan/_kernels/_core.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
