"""Pick the compiled kernels when available, else the pure-Python ones.

Set ``RAINBOWAP_PUREPY=1`` to force the fallback.
"""
import os

from . import _pykernels

python_kernels = _pykernels

compiled_kernels = None
if os.environ.get("RAINBOWAP_PUREPY", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:  # extension not built
        compiled_kernels = None

kernels = compiled_kernels if compiled_kernels is not None else python_kernels
NAME = "compiled" if compiled_kernels is not None else "python"


def get(name: str | None = None):
    """Kernel module by name: ``"compiled"``, ``"python"`` or ``None`` (default)."""
    if name is None:
        return kernels
    if name == "python":
        return python_kernels
    if name == "compiled":
        if compiled_kernels is None:
            raise RuntimeError("compiled kernels are not available")
        return compiled_kernels
    raise ValueError(f"unknown backend {name!r}")
