"""Builds the optional Cython annealing kernel.

The package works without it: ``fccfold.kernels`` falls back to the
pure-Python implementation when the extension cannot be imported.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FCCFOLD_NO_EXT"):
    try:
        from Cython.Build import cythonize
        import numpy

        ext_modules = cythonize(
            ["src/fccfold/_anneal.pyx"],
            compiler_directives={"language_level": "3"},
        )
        for ext in ext_modules:
            ext.include_dirs.append(numpy.get_include())
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
