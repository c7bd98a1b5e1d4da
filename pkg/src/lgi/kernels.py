"""Kernel dispatch: compiled float64 loops when available, numpy otherwise.

The compiled extension is picked at import time.  Setting ``LGI_PURE=1``
forces the numpy fallback (used by the benchmark and by the test that
checks both backends agree).  Object (rational) arrays always take the
numpy path.
"""

import os

import numpy as np

from . import _kernels_py as _py

try:
    if os.environ.get("LGI_PURE") == "1":
        raise ImportError("pure mode requested")
    from . import _ckernels as _c
except ImportError:
    _c = None

BACKEND = "cython" if _c is not None else "python"


def _fast(*arrays):
    return _c is not None and all(a.dtype == np.float64 for a in arrays)


def cauchy_mul(a, b, order):
    if _fast(a, b):
        shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
        aa = np.ascontiguousarray(np.broadcast_to(a[: order + 1], (order + 1,) + shape)).reshape(order + 1, -1)
        bb = np.ascontiguousarray(np.broadcast_to(b[: order + 1], (order + 1,) + shape)).reshape(order + 1, -1)
        return _c.cauchy_mul_flat(aa, bb, order).reshape((order + 1,) + shape)
    return _py.cauchy_mul(a, b, order)


def cauchy_matmul(a, b, order):
    if _fast(a, b) and a.ndim == 3 and b.ndim == 3:
        return _c.cauchy_matmul3(
            np.ascontiguousarray(a[: order + 1]), np.ascontiguousarray(b[: order + 1]), order
        )
    return _py.cauchy_matmul(a, b, order)


def cauchy_mul2(a, b, order_a, order_b):
    if _fast(a, b):
        return _c.cauchy_mul2(
            np.ascontiguousarray(a[: order_a + 1, : order_b + 1]),
            np.ascontiguousarray(b[: order_a + 1, : order_b + 1]),
            order_a,
            order_b,
        )
    return _py.cauchy_mul2(a, b, order_a, order_b)


def taylor_linear(x0, c, order):
    if _fast(x0, c):
        return _c.taylor_linear(np.ascontiguousarray(x0), np.ascontiguousarray(c[:order]), order)
    return _py.taylor_linear(x0, c, order)
