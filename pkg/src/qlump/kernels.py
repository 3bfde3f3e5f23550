"""Backend selection for the hot loops.

The compiled extension ``qlump._kernels`` is used when it was built; otherwise, or when the
environment variable ``QLUMP_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy implementations in ``qlump._kernels_py`` are used. Both give identical results.
"""
import os

from . import _kernels_py


def _load_compiled():
    if os.environ.get("QLUMP_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


_compiled = _load_compiled()
_impl = _compiled if _compiled is not None else _kernels_py

BACKEND = "cython" if _compiled is not None else "python"

lloyd = _impl.lloyd
inertia = _impl.inertia
block_sums = _impl.block_sums
iterate_lumping = _impl.iterate_lumping


def implementations():
    """Mapping of available backend names to kernel modules."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["cython"] = _compiled
    else:
        try:
            from . import _kernels
        except ImportError:
            pass
        else:
            out["cython"] = _kernels
    return out
