"""Build the optional Cython kernels.

The package works without them: ``thermorecycle.kernels`` falls back to the
pure-Python implementation when the extension is not importable.
"""
import os

from setuptools import setup

ext_modules = []
if os.environ.get("THERMORECYCLE_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "thermorecycle._kernels",
                    ["src/thermorecycle/_kernels.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
