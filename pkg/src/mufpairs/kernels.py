"""Backend selection for the search objectives.

The compiled ``_ckernels`` extension is used when it was built; otherwise,
or when ``MUF_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy implementation in ``_pykernels`` is used.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def _default_backend():
    if os.environ.get("MUF_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
        return "python"
    return "cython"


BACKEND = _default_backend()
_impl = BACKENDS[BACKEND]


def get_backend(name=None):
    """Module implementing the objectives for ``name`` (default: the selected backend)."""
    if name is None:
        return _impl
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}") from None


def general_loss_grad(params, d, t):
    return _impl.general_loss_grad(params, d, t)


def covariant_loss_grad(params, d, t):
    return _impl.covariant_loss_grad(params, d, t)


def set_backend(name):
    """Switch the process-wide backend; returns the previous name."""
    global BACKEND, _impl
    previous = BACKEND
    _impl = get_backend(name)
    BACKEND = name
    return previous
