"""Selects the annealing kernel backend at import time.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``FCCFOLD_PURE_PYTHON`` is set to a non-empty value,
the pure-Python implementation is used.
"""
import os

from . import _anneal_py

python_anneal = _anneal_py.anneal

try:
    if os.environ.get("FCCFOLD_PURE_PYTHON"):
        raise ImportError("pure Python forced by FCCFOLD_PURE_PYTHON")
    from ._anneal import anneal as compiled_anneal
except ImportError:
    compiled_anneal = None

if compiled_anneal is not None:
    anneal = compiled_anneal
    BACKEND = "cython"
else:
    anneal = python_anneal
    BACKEND = "python"
