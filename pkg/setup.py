"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a pure-Python
backend is selected at import time), so a failed or skipped build is
not fatal.  Set MDTK_SKIP_EXT=1 to force a pure-Python install.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("MDTK_SKIP_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "mdtk._kernels._cy",
                    ["src/mdtk/_kernels/_cy.pyx"],
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
        ext_modules = []

setup(ext_modules=ext_modules)
