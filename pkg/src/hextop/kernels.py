"""Backend selection for the inner-loop kernels.

The compiled Cython module is used when it was built; otherwise the NumPy
fallback is loaded. Set ``HEXTOP_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

try:
    if os.environ.get("HEXTOP_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-Python backend requested")
    from . import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

filter_triplets = _impl.filter_triplets
# the BLAS-backed einsum beats the compiled loop for 12x12 blocks
# (see benchmarks/bench_kernels.py), so it is used with either backend
element_energies = _pykernels.element_energies
scatter_values = _impl.scatter_values


def backends():
    """All importable kernel modules keyed by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
