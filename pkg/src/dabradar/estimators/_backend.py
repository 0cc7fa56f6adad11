"""Select the compiled tracker kernel, falling back to numpy."""

import os

from . import _kernel_py

BACKEND = "python"
run_tracker = _kernel_py.run_tracker

if not os.environ.get("DABRADAR_PURE_PYTHON"):
    try:
        from ._kernel import run_tracker  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass


def get_kernel(name=None):
    """Return a tracker kernel by name (``"cython"``/``"python"``), default the active one."""
    if name is None:
        return run_tracker
    if name == "python":
        return _kernel_py.run_tracker
    if name == "cython":
        from ._kernel import run_tracker as compiled
        return compiled
    raise ValueError(f"unknown backend {name!r}")
