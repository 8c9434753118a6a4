"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python twin is selected at
import time); building it makes the exact solver roughly two orders of
magnitude faster. `optional=True` keeps installs working on boxes without a
C toolchain.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "linkact._core_cy",
                ["src/linkact/_core_cy.pyx"],
                # no FP contraction: results must match the pure-Python twin
                # bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off"],
                optional=True,
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
