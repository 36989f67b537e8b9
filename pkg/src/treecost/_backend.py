"""Kernel backend selection.

The compiled Cython extension is preferred when importable; the pure-numpy
module is the fallback.  ``TREECOST_BACKEND=python|compiled`` forces one
(``compiled`` raises if the extension is missing).
"""
import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_kernel_modules = {"python": _kernels_py}
if _compiled is not None:
    _kernel_modules["compiled"] = _compiled


def _select():
    forced = os.environ.get("TREECOST_BACKEND", "").strip().lower()
    if forced in ("", "auto"):
        return _compiled if _compiled is not None else _kernels_py
    if forced in ("compiled", "cython", "c"):
        if _compiled is None:
            raise ImportError(
                "TREECOST_BACKEND=compiled but the treecost._kernels extension "
                "is not built; install with Cython or unset the variable"
            )
        return _compiled
    if forced in ("python", "pure"):
        return _kernels_py
    raise ValueError("unrecognized TREECOST_BACKEND value %r" % forced)


_active = _select()

decode_codes = _active.decode_codes
costs_from_parents = _active.costs_from_parents
ga_epoch = _active.ga_epoch


def backend_name() -> str:
    return _active.BACKEND


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_kernel_modules))


def get_kernels(name: str):
    """Fetch a specific kernel module (for parity tests and benchmarks)."""
    return _kernel_modules[name]
