"""Backend selection for the sweep kernel.

The compiled extension is used when it imports; set ``HETSTEER_KERNEL=python``
to force the NumPy implementation. :func:`use` switches at runtime.

The compiled loop streams the whole operator stack once per outcome, so past
``CYTHON_MAX_SUPPORT`` levels the blocked BLAS product of the NumPy path wins
and the selected "cython" backend hands those calls over to it.
"""
import os

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

CYTHON_MAX_SUPPORT = 96

_BACKENDS = {"python": _kernels_py.quadratic_forms}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels.quadratic_forms


def _hybrid(f, betas):
    if f.shape[-1] > CYTHON_MAX_SUPPORT:
        return _kernels_py.quadratic_forms(f, betas)
    return _ckernels.quadratic_forms(f, betas)


def available() -> list[str]:
    return sorted(_BACKENDS)


def use(name: str) -> None:
    global BACKEND, quadratic_forms
    if name not in _BACKENDS:
        raise ValueError(f"kernel backend {name!r} is not available (have {available()})")
    BACKEND = name
    quadratic_forms = _hybrid if name == "cython" else _BACKENDS[name]


def get(name: str):
    """The raw kernel of one backend, without size-based dispatch."""
    return _BACKENDS[name]


use("cython" if _ckernels is not None and os.environ.get("HETSTEER_KERNEL") != "python" else "python")
