"""Build script.  The Cython extension is optional: without a compiler (or with
DENSEBAL_PURE_PYTHON=1) the package installs with the pure-Python kernels only.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("DENSEBAL_PURE_PYTHON") != "1":
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "densebal.kernels._speedups",
                    ["src/densebal/kernels/_speedups.pyx"],
                    include_dirs=[numpy.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
