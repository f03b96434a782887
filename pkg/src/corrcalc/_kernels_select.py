"""Pick the compiled kernels when they were built, else the Python ones."""
try:
    from corrcalc import _kernels as kernels
    COMPILED = True
except ImportError:  # pragma: no cover - depends on the build
    from corrcalc import _kernels_py as kernels
    COMPILED = False

from corrcalc import _kernels_py as py_kernels

__all__ = ["kernels", "py_kernels", "COMPILED"]
