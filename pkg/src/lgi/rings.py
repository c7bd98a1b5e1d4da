"""Coefficient rings for jets: IEEE doubles and exact rationals.

Every jet carries one of the two ring singletons, :data:`FLOAT` or
:data:`RATIONAL`.  Float arrays use ``float64``; rational arrays are
``object`` arrays of :class:`gmpy2.mpq`.

The float zero test is relative: ``|x| <= tol * scale`` where ``scale`` is
usually the largest magnitude among the coefficients under consideration.
The default tolerance is ``1e-9`` and can be overridden through the
``LGI_TOL`` environment variable.
"""

import math
import os
from fractions import Fraction

import numpy as np
from gmpy2 import is_square, isqrt, mpq

from .errors import DomainError

DEFAULT_TOL = 1e-9


def _env_tol():
    raw = os.environ.get("LGI_TOL")
    if raw is None:
        return DEFAULT_TOL
    return float(raw)


class Ring:
    name = "abstract"
    dtype = object
    exact = False

    def __repr__(self):
        return f"<ring {self.name}>"

    def __reduce__(self):
        return (get_ring, (self.name,))

    def zeros(self, shape):
        return np.zeros(shape, dtype=self.dtype)

    def eye(self, n):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def asarray(self, x):
        raise NotImplementedError

    def coerce(self, x):
        raise NotImplementedError


class FloatRing(Ring):
    """Double precision with a relative zero tolerance."""

    name = "float"
    dtype = np.float64
    exact = False
    one = 1.0
    zero = 0.0

    @property
    def tol(self):
        return _env_tol()

    def asarray(self, x):
        if isinstance(x, np.ndarray) and x.dtype == object:
            return np.array([float(v) for v in x.ravel()], dtype=np.float64).reshape(x.shape)
        return np.asarray(x, dtype=np.float64)

    def coerce(self, x):
        if isinstance(x, str):
            return float(Fraction(x))
        return float(x)

    def is_zero(self, x, scale=1.0, tol=None):
        tol = self.tol if tol is None else tol
        return abs(x) <= tol * max(float(scale), 1e-300)

    def magnitude(self, x):
        return abs(float(x))

    def sqrt(self, x):
        if x <= 0:
            raise DomainError(f"sqrt needs a positive constant term, got {x!r}")
        return math.sqrt(x)

    def log(self, x):
        if x <= 0:
            raise DomainError(f"ln needs a positive constant term, got {x!r}")
        return math.log(x)

    exp = staticmethod(math.exp)
    sin = staticmethod(math.sin)
    cos = staticmethod(math.cos)

    def format(self, x):
        return float(x)


class RationalRing(Ring):
    """Exact rationals (gmpy2 ``mpq``); the zero test is exact."""

    name = "rational"
    dtype = object
    exact = True
    one = mpq(1)
    zero = mpq(0)
    tol = 0.0

    def zeros(self, shape):
        out = np.empty(shape, dtype=object)
        out.fill(mpq(0))
        return out

    def asarray(self, x):
        arr = np.asarray(x, dtype=object)
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for i, v in enumerate(arr.reshape(-1)):
            flat[i] = self.coerce(v)
        return out

    def coerce(self, x):
        if isinstance(x, (float, np.floating)):
            raise TypeError(f"refusing to coerce float {x!r} into the rational ring")
        if isinstance(x, Fraction):
            return mpq(x.numerator, x.denominator)
        if isinstance(x, str):
            return mpq(Fraction(x).numerator, Fraction(x).denominator)
        if isinstance(x, np.integer):
            return mpq(int(x))
        return mpq(x)

    def is_zero(self, x, scale=1.0, tol=None):
        return x == 0

    def magnitude(self, x):
        return abs(x)

    def sqrt(self, x):
        x = mpq(x)
        if x <= 0:
            raise DomainError(f"sqrt needs a positive constant term, got {x}")
        p, q = x.numerator, x.denominator
        if not (is_square(p) and is_square(q)):
            raise DomainError(f"sqrt of {x} is not rational")
        return mpq(isqrt(p), isqrt(q))

    def log(self, x):
        if x != 1:
            raise DomainError(f"ln of rational constant term {x} is not rational (only 1 is allowed)")
        return mpq(0)

    def exp(self, x):
        if x != 0:
            raise DomainError(f"exp({x}) is not rational")
        return mpq(1)

    def sin(self, x):
        if x != 0:
            raise DomainError(f"sin({x}) is not rational")
        return mpq(0)

    def cos(self, x):
        if x != 0:
            raise DomainError(f"cos({x}) is not rational")
        return mpq(1)

    def format(self, x):
        x = mpq(x)
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"


FLOAT = FloatRing()
RATIONAL = RationalRing()


def get_ring(ring):
    if isinstance(ring, Ring):
        return ring
    if ring in ("float", None):
        return FLOAT
    if ring == "rational":
        return RATIONAL
    raise ValueError(f"unknown ring {ring!r}")


def to_float(x):
    """Convert a ring array (or scalar) to float64."""
    return FLOAT.asarray(x) if isinstance(x, np.ndarray) else float(x)
