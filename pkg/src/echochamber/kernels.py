"""Select the compiled kernels when available, else the pure-Python ones.

Set ``ECHOCHAMBER_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernels

if os.environ.get("ECHOCHAMBER_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

cooccurrence = _impl.cooccurrence
louvain_local_moves = _impl.louvain_local_moves
label_propagation_sweep = _impl.label_propagation_sweep
label_propagation_stable = _impl.label_propagation_stable


def implementations():
    """Return ``{"python": module, "cython": module}`` for whatever is importable."""
    impls = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        impls["cython"] = _ckernels
    return impls
