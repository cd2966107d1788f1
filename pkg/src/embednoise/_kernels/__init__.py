"""Metropolis sweep kernels: compiled extension with pure-python fallback.

Both backends implement `run_metropolis` with identical semantics and
consume the same pre-generated random arrays, so for a given seed they
produce bitwise-identical sample sets. Set EMBEDNOISE_BACKEND=python to
force the fallback (e.g. for benchmarking).
"""

from __future__ import annotations

import os

from . import _sa_py

try:
    from . import _sa_cy

    _HAVE_CYTHON = True
except ImportError:
    _sa_cy = None
    _HAVE_CYTHON = False


def get_kernel(name: str | None = None):
    """Return the kernel module for `name` (cython|python|auto)."""
    if name is None:
        name = os.environ.get("EMBEDNOISE_BACKEND", "auto")
    name = name.lower()
    if name in ("auto", ""):
        return _sa_cy if _HAVE_CYTHON else _sa_py
    if name == "cython":
        if not _HAVE_CYTHON:
            raise RuntimeError("compiled kernel is not available")
        return _sa_cy
    if name == "python":
        return _sa_py
    raise ValueError(f"unknown backend {name!r}")


BACKEND = "cython" if _HAVE_CYTHON and os.environ.get(
    "EMBEDNOISE_BACKEND", "auto") in ("auto", "", "cython") else "python"
run_metropolis = get_kernel().run_metropolis
