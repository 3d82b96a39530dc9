"""Backend selection for the Gibbs-family kernels.

The compiled extension ``thermorecycle._kernels`` is used when importable;
otherwise the pure-Python module is used. Set ``THERMORECYCLE_PURE_PYTHON=1``
to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("THERMORECYCLE_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

gibbs_stats = _impl.gibbs_stats
gibbs_entropy = _impl.gibbs_entropy
log_temperature_of_entropy = _impl.log_temperature_of_entropy


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    backends = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        backends["cython"] = _kernels
    return backends
