"""Batched numeric kernels with backend selection at import time.

The compiled extension ``s2xs2._kernels`` is used when it is importable;
otherwise the numpy implementations in ``s2xs2._fallback`` are used.
Setting ``S2XS2_BACKEND=python`` forces the fallback.

Public wrappers accept any leading batch shape (including none) and
broadcast their arguments against each other.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("S2XS2_BACKEND", "").lower() == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

__all__ = ["BACKEND", "fa_apply", "lift", "qmul", "qrotate", "spin_cover", "use"]


def use(name):
    """Switch backend at runtime (``"cython"`` or ``"python"``); returns the old name."""
    global _impl, BACKEND
    old = BACKEND
    if name == "python":
        _impl = _fallback
    elif name == "cython":
        from . import _kernels
        _impl = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name
    return old


def _flat(arr, tail):
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    return arr.reshape((-1,) + tail)


def _prep(*pairs):
    """Broadcast (array, core_ndim) pairs over their leading axes."""
    arrays = [np.asarray(a, dtype=np.float64) for a, _ in pairs]
    lead = np.broadcast_shapes(*(a.shape[: a.ndim - k] for a, (_, k) in zip(arrays, pairs)))
    out = []
    for a, (_, k) in zip(arrays, pairs):
        tail = a.shape[a.ndim - k:]
        out.append(_flat(np.broadcast_to(a, lead + tail), tail))
    return lead, out


def qmul(p, q):
    lead, (p2, q2) = _prep((p, 1), (q, 1))
    return _impl.qmul(p2, q2).reshape(lead + (4,))


def qrotate(w, x):
    """conj(w) x w for unit quaternions ``w`` and imaginary 3-vectors ``x``."""
    lead, (w2, x2) = _prep((w, 1), (x, 1))
    return _impl.qrotate(w2, x2).reshape(lead + (3,))


def spin_cover(w):
    lead, (w2,) = _prep((w, 1))
    return _impl.spin_cover(w2).reshape(lead + (3, 3))


def lift(R):
    """One preimage under :func:`spin_cover` (sign unspecified)."""
    lead, (R2,) = _prep((R, 2))
    return _impl.lift(R2).reshape(lead + (4,))


def fa_apply(A, u, v):
    lead, (A2, u2, v2) = _prep((A, 2), (u, 1), (v, 1))
    nu, nv = _impl.fa_apply(A2, u2, v2)
    return nu.reshape(lead + (3,)), nv.reshape(lead + (3,))
