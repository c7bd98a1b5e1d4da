"""Pure numpy kernels for truncated power series.

These work for any dtype, including ``object`` arrays of rationals.  The
compiled module ``_ckernels`` mirrors the float64 entry points.
"""

import numpy as np


def _zeros(shape, *arrays):
    dtype = object if any(a.dtype == object for a in arrays) else np.float64
    return np.zeros(shape, dtype=dtype)


def cauchy_mul(a, b, order):
    """Truncated Cauchy product along axis 0, elementwise (broadcast) on the rest."""
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    out = _zeros((order + 1,) + shape, a, b)
    for p in range(order + 1):
        out[p:] += a[p] * b[: order + 1 - p]
    return out


def cauchy_matmul(a, b, order):
    """Truncated Cauchy product along axis 0 with matrix products on the rest."""
    shape = np.broadcast_shapes(a.shape[1:-2], b.shape[1:-2]) + (a.shape[-2], b.shape[-1])
    out = _zeros((order + 1,) + shape, a, b)
    for p in range(order + 1):
        out[p:] += np.matmul(a[p], b[: order + 1 - p])
    return out


def cauchy_mul2(a, b, order_a, order_b):
    """Truncated product of bivariate coefficient rectangles."""
    out = _zeros((order_a + 1, order_b + 1), a, b)
    for i in range(order_a + 1):
        row = a[i]
        for j in range(order_b + 1):
            aij = row[j]
            if aij == 0:
                continue
            out[i:, j:] += aij * b[: order_a + 1 - i, : order_b + 1 - j]
    return out


def taylor_linear(x0, c, order):
    """Taylor coefficients of X with X' = X C(t), X(0) = x0.

    ``c`` holds the coefficients of C and must have at least ``order`` of them.
    """
    n = x0.shape[0]
    out = _zeros((order + 1,) + x0.shape, x0, c)
    out[0] = x0
    for k in range(order):
        acc = _zeros(x0.shape, x0, c)
        for p in range(k + 1):
            acc = acc + out[k - p] @ c[p]
        out[k + 1] = acc / (k + 1)
    return out
