"""Truncated power series ("jets") in one and two variables.

:class:`Jet` is a univariate expansion ``sum_k c_k (t - base)^k`` whose
coefficients may be scalars or arrays of any shape, so a single object can
stand for a scalar function, a vector-valued curve or a matrix family.
Binary operations truncate to the smaller order.

:class:`Jet2` is a scalar bivariate expansion ``sum c_jk a^j b^k`` stored on
a full rectangle of coefficients.
"""

from math import comb

import numpy as np

from . import kernels
from .errors import DomainError, NotDivisibleError
from .rings import FLOAT, get_ring

__all__ = [
    "Jet",
    "Jet1",
    "Jet2",
    "derive",
    "diagonal_substitute",
    "divide_by_power",
    "jet_stack",
    "ln",
    "partials",
    "reciprocal",
    "sqrt",
    "valuation",
]


def _make(cls, coeffs, ring, base):
    obj = object.__new__(cls)
    obj.coeffs = coeffs
    obj.ring = ring
    obj.base = base
    return obj


def _int_factors(ring, values, ndim):
    """Integer multipliers shaped to broadcast against a coefficient array."""
    arr = ring.asarray(list(values))
    return arr.reshape((-1,) + (1,) * ndim)


class Jet:
    """Univariate jet with scalar- or array-valued coefficients.

    Parameters
    ----------
    coeffs : array_like
        Coefficients, axis 0 is the power of ``t - base``.
    ring : Ring or str
        ``"float"`` (default) or ``"rational"``.
    base : scalar
        Expansion point.
    """

    __slots__ = ("coeffs", "ring", "base")
    __array_ufunc__ = None

    def __init__(self, coeffs, ring=FLOAT, base=0):
        ring = get_ring(ring)
        c = ring.asarray(coeffs)
        if c.ndim == 0:
            raise ValueError("jet coefficients need at least one axis")
        self.coeffs = c
        self.ring = ring
        self.base = base

    # -- construction -------------------------------------------------
    @classmethod
    def constant(cls, value, order, ring=FLOAT, base=0):
        ring = get_ring(ring)
        v = ring.asarray(value)
        c = ring.zeros((order + 1,) + v.shape)
        # a 0-d object array assigned into an object array would be nested
        c[0] = v if v.ndim else v[()]
        return _make(cls, c, ring, base)

    @classmethod
    def variable(cls, base=0, order=1, ring=FLOAT):
        """The identity function ``t`` expanded at ``base``."""
        ring = get_ring(ring)
        c = ring.zeros(order + 1)
        c[0] = ring.coerce(base)
        if order >= 1:
            c[1] = ring.one
        return _make(cls, c, ring, base)

    @classmethod
    def zeros(cls, shape, order, ring=FLOAT, base=0):
        ring = get_ring(ring)
        return _make(cls, ring.zeros((order + 1,) + tuple(shape)), ring, base)

    def _new(self, coeffs):
        return _make(Jet, coeffs, self.ring, self.base)

    # -- shape --------------------------------------------------------
    @property
    def order(self):
        return self.coeffs.shape[0] - 1

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def ndim(self):
        return self.coeffs.ndim - 1

    @property
    def value(self):
        """Constant term (the value at the base point)."""
        return self.coeffs[0]

    @property
    def T(self):
        if self.ndim < 2:
            return self
        return self._new(np.swapaxes(self.coeffs, -1, -2))

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self._new(self.coeffs[(slice(None),) + idx])

    def __len__(self):
        return self.shape[0]

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot raise order {self.order} to {order}")
        return self._new(self.coeffs[: order + 1])

    def pad(self, order):
        """Zero-extend to ``order``, treating the jet as an exact polynomial."""
        if order <= self.order:
            return self
        c = self.ring.zeros((order + 1,) + self.shape)
        c[: self.order + 1] = self.coeffs
        return self._new(c)

    def to_ring(self, ring):
        ring = get_ring(ring)
        if ring is self.ring:
            return self
        if ring.exact:
            raise TypeError("float jets cannot be converted to the rational ring")
        return _make(Jet, ring.asarray(self.coeffs), ring, float(self.base))

    def copy(self):
        return self._new(self.coeffs.copy())

    def __repr__(self):
        return f"Jet(order={self.order}, shape={self.shape}, ring={self.ring.name}, base={self.base})"

    # -- arithmetic ---------------------------------------------------
    def _check(self, other):
        if other.ring is not self.ring:
            raise TypeError(f"ring mismatch: {self.ring.name} vs {other.ring.name}")
        if other.base != self.base:
            raise ValueError(f"mismatched base points {self.base} and {other.base}")

    def _const(self, x):
        if isinstance(x, np.ndarray) and x.dtype == self.ring.dtype:
            return x
        return self.ring.asarray(x)

    def _lifted(self, ndim):
        """Coefficients with leading singleton value axes up to ``ndim``."""
        extra = ndim - self.ndim
        if extra <= 0:
            return self.coeffs
        return self.coeffs.reshape((self.order + 1,) + (1,) * extra + self.shape)

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            k = min(self.order, other.order)
            return self._new(self.coeffs[: k + 1] + other.coeffs[: k + 1])
        c = self._const(other)
        shape = np.broadcast_shapes(self.shape, c.shape)
        out = np.array(np.broadcast_to(self._lifted(c.ndim), (self.order + 1,) + shape))
        out[0] = out[0] + c
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            k = min(self.order, other.order)
            nd = max(self.ndim, other.ndim)
            return self._new(kernels.cauchy_mul(self._lifted(nd), other._lifted(nd), k))
        c = self._const(other)
        return self._new(self._lifted(c.ndim) * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        c = self._const(other)
        return self._new(self._lifted(c.ndim) / c)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if int(n) != n:
            raise ValueError("only integer powers of jets are supported")
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        result = Jet.constant(np.full(self.shape, self.ring.one, dtype=self.ring.dtype), self.order, self.ring, self.base)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __matmul__(self, other):
        if isinstance(other, Jet):
            self._check(other)
            k = min(self.order, other.order)
            a, b = self.coeffs[: k + 1], other.coeffs[: k + 1]
            va, vb = a.ndim == 2, b.ndim == 2
            if va:
                a = a[:, None, :]
            if vb:
                b = b[:, :, None]
            out = kernels.cauchy_matmul(a, b, k)
            if vb:
                out = out[..., 0]
            if va:
                out = out[..., 0, :] if not vb else out[..., 0]
            return self._new(out)
        c = self._const(other)
        return self._new(np.matmul(self.coeffs, c))

    def __rmatmul__(self, other):
        c = self._const(other)
        if self.ndim == 1:
            return self._new(self.coeffs @ c.T) if c.ndim == 2 else self._new(self.coeffs @ c)
        return self._new(np.matmul(c, self.coeffs))

    # -- calculus -----------------------------------------------------
    def derive(self):
        """Derivative in t; the order drops by one."""
        if self.order < 1:
            raise DomainError("cannot differentiate a jet of order 0")
        f = _int_factors(self.ring, range(1, self.order + 1), self.ndim)
        return self._new(self.coeffs[1:] * f)

    def derivatives(self, n):
        """List ``[self, self', ..., self^(n)]``."""
        out = [self]
        for _ in range(n):
            out.append(out[-1].derive())
        return out

    def integrate(self):
        """Formal antiderivative with zero constant; the order grows by one."""
        f = _int_factors(self.ring, range(1, self.order + 2), self.ndim)
        c = self.ring.zeros((self.order + 2,) + self.shape)
        c[1:] = self.coeffs / f
        return self._new(c)

    def evaluate(self, h):
        """Value of the truncated polynomial at ``t = base + h``."""
        h = self.ring.coerce(h)
        acc = self.coeffs[-1]
        for k in range(self.order - 1, -1, -1):
            acc = acc * h + self.coeffs[k]
        return acc

    def shift(self, h):
        """Re-expand the truncated polynomial at ``base + h`` (same order)."""
        h = self.ring.coerce(h)
        K = self.order
        out = self.ring.zeros(self.coeffs.shape)
        powers = [self.ring.one]
        for _ in range(K):
            powers.append(powers[-1] * h)
        for k in range(K + 1):
            acc = out[k]
            for j in range(k, K + 1):
                acc = acc + self.coeffs[j] * (comb(j, k) * powers[j - k])
            out[k] = acc
        return _make(Jet, out, self.ring, self.base + h)

    # -- elementwise series functions ----------------------------------
    def _scalar_map(self, fn, arr):
        if not isinstance(arr, np.ndarray):
            return fn(arr)
        out = np.empty(arr.shape, dtype=self.ring.dtype)
        flat = out.reshape(-1)
        for i, v in enumerate(arr.reshape(-1)):
            flat[i] = fn(v)
        return out

    # Domain checks look at the constant term alone, against the absolute
    # tolerance: in long jets the high coefficients can grow geometrically,
    # and a test relative to them would reject perfectly good constants.
    def _require_nonzero(self, what):
        c0 = self.coeffs[0]
        for v in np.asarray(c0).reshape(-1):
            if self.ring.is_zero(v, 1.0):
                raise DomainError(f"{what} needs a nonzero constant term, got {v}")

    def _require_positive(self, what):
        c0 = self.coeffs[0]
        for v in np.asarray(c0).reshape(-1):
            if v <= 0 or self.ring.is_zero(v, 1.0):
                raise DomainError(f"{what} needs a positive constant term, got {v}")

    def magnitude_scale(self):
        if self.ring.exact:
            return 1
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def reciprocal(self):
        self._require_nonzero("reciprocal")
        c = self.coeffs
        r = self.ring.zeros(c.shape)
        r0 = self._scalar_map(lambda v: self.ring.one / v, c[0])
        r[0] = r0
        for n in range(1, self.order + 1):
            acc = c[1] * r[n - 1]
            for k in range(2, n + 1):
                acc = acc + c[k] * r[n - k]
            r[n] = -r0 * acc
        return self._new(r)

    def ln(self):
        self._require_positive("ln")
        c = self.coeffs
        f = self.ring.zeros(c.shape)
        f[0] = self._scalar_map(self.ring.log, c[0])
        for n in range(1, self.order + 1):
            acc = n * c[n]
            for k in range(1, n):
                acc = acc - k * f[k] * c[n - k]
            f[n] = acc / (n * c[0])
        return self._new(f)

    def sqrt(self):
        """Square root on the branch with positive constant term."""
        self._require_positive("sqrt")
        c = self.coeffs
        s = self.ring.zeros(c.shape)
        s[0] = self._scalar_map(self.ring.sqrt, c[0])
        for n in range(1, self.order + 1):
            acc = c[n]
            for k in range(1, n):
                acc = acc - s[k] * s[n - k]
            s[n] = acc / (2 * s[0])
        return self._new(s)

    def exp(self):
        c = self.coeffs
        f = self.ring.zeros(c.shape)
        f[0] = self._scalar_map(self.ring.exp, c[0])
        for n in range(1, self.order + 1):
            acc = c[1] * f[n - 1]
            for k in range(2, n + 1):
                acc = acc + k * c[k] * f[n - k]
            f[n] = acc / n
        return self._new(f)

    def sincos(self):
        c = self.coeffs
        s = self.ring.zeros(c.shape)
        co = self.ring.zeros(c.shape)
        s[0] = self._scalar_map(self.ring.sin, c[0])
        co[0] = self._scalar_map(self.ring.cos, c[0])
        for n in range(1, self.order + 1):
            acc_s = c[1] * co[n - 1]
            acc_c = c[1] * s[n - 1]
            for k in range(2, n + 1):
                acc_s = acc_s + k * c[k] * co[n - k]
                acc_c = acc_c + k * c[k] * s[n - k]
            s[n] = acc_s / n
            co[n] = -acc_c / n
        return self._new(s), self._new(co)

    def sin(self):
        return self.sincos()[0]

    def cos(self):
        return self.sincos()[1]

    def tan(self):
        s, c = self.sincos()
        return s / c

    # -- inspection ---------------------------------------------------
    def valuation(self, tol=None):
        """Index of the first coefficient that is not zero.

        Float jets compare against ``tol`` times the largest coefficient
        magnitude.  Returns ``None`` when every retained coefficient
        vanishes ("zero to order").
        """
        scale = self.magnitude_scale()
        for j in range(self.order + 1):
            if any(not self.ring.is_zero(v, scale, tol) for v in np.asarray(self.coeffs[j]).reshape(-1)):
                return j
        return None

    def max_abs(self):
        """Largest coefficient magnitude, as a float."""
        if self.coeffs.size == 0:
            return 0.0
        return max(float(abs(v)) for v in self.coeffs.reshape(-1))

    def to_float(self):
        return _make(Jet, FLOAT.asarray(self.coeffs), FLOAT, float(self.base))


Jet1 = Jet


def jet_stack(jets, axis=0):
    """Stack jets of equal value shape along a new value axis."""
    jets = list(jets)
    first = jets[0]
    for j in jets[1:]:
        first._check(j)
    k = min(j.order for j in jets)
    coeffs = np.stack([j.coeffs[: k + 1] for j in jets], axis=axis + 1)
    return _make(Jet, coeffs, first.ring, first.base)


def jet_concat(jets, axis=0):
    """Concatenate jets along an existing value axis."""
    jets = list(jets)
    first = jets[0]
    for j in jets[1:]:
        first._check(j)
    k = min(j.order for j in jets)
    coeffs = np.concatenate([j.coeffs[: k + 1] for j in jets], axis=axis + 1)
    return _make(Jet, coeffs, first.ring, first.base)


class Jet2:
    """Scalar bivariate jet ``sum c_jk a^j b^k`` on a full coefficient rectangle."""

    __slots__ = ("coeffs", "ring", "base")

    def __init__(self, coeffs, ring=FLOAT, base=(0, 0)):
        ring = get_ring(ring)
        c = ring.asarray(coeffs)
        if c.ndim != 2:
            raise ValueError("bivariate jet coefficients must be 2-dimensional")
        self.coeffs = c
        self.ring = ring
        self.base = tuple(base)

    @classmethod
    def zeros(cls, orders, ring=FLOAT, base=(0, 0)):
        ring = get_ring(ring)
        return _make(cls, ring.zeros((orders[0] + 1, orders[1] + 1)), ring, tuple(base))

    def _new(self, coeffs):
        return _make(Jet2, coeffs, self.ring, self.base)

    @property
    def orders(self):
        return (self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1)

    def __repr__(self):
        return f"Jet2(orders={self.orders}, ring={self.ring.name})"

    def truncate(self, order_a, order_b):
        return self._new(self.coeffs[: order_a + 1, : order_b + 1])

    def _check(self, other):
        if other.ring is not self.ring:
            raise TypeError(f"ring mismatch: {self.ring.name} vs {other.ring.name}")
        if other.base != self.base:
            raise ValueError(f"mismatched base points {self.base} and {other.base}")

    def _common(self, other):
        ka = min(self.orders[0], other.orders[0])
        kb = min(self.orders[1], other.orders[1])
        return ka, kb

    def __add__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            ka, kb = self._common(other)
            return self._new(self.coeffs[: ka + 1, : kb + 1] + other.coeffs[: ka + 1, : kb + 1])
        out = self.coeffs.copy()
        out[0, 0] = out[0, 0] + self.ring.coerce(other)
        return self._new(out)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            self._check(other)
            ka, kb = self._common(other)
            return self._new(kernels.cauchy_mul2(self.coeffs, other.coeffs, ka, kb))
        return self._new(self.coeffs * self.ring.coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._new(self.coeffs / self.ring.coerce(other))

    def evaluate(self, a, b):
        a = self.ring.coerce(a)
        b = self.ring.coerce(b)
        ka, kb = self.orders
        pa = [self.ring.one]
        for _ in range(ka):
            pa.append(pa[-1] * a)
        pb = [self.ring.one]
        for _ in range(kb):
            pb.append(pb[-1] * b)
        return sum(self.coeffs[j, k] * pa[j] * pb[k] for j in range(ka + 1) for k in range(kb + 1))

    def slice_second_zero(self):
        """Univariate jet in the first variable at ``b = 0``."""
        return _make(Jet, self.coeffs[:, 0].copy(), self.ring, self.base[0])

    def max_abs(self):
        return max(float(abs(v)) for v in self.coeffs.reshape(-1))

    # -- operations ---------------------------------------------------
    def diagonal_substitute(self):
        """Rewrite ``D(a, b)`` in the variables ``(w, b)`` with ``a = b + w``.

        The stored rectangle is treated as an exact polynomial, so the
        result has orders ``(Ka, Ka + Kb)`` and nothing is lost.  Callers
        that treat the input as a truncated series should truncate the
        result to the region where it is meaningful (total degree at most
        ``min(Ka, Kb)``).
        """
        ka, kb = self.orders
        out = self.ring.zeros((ka + 1, ka + kb + 1))
        for j in range(ka + 1):
            row = self.coeffs[j]
            if all(v == 0 for v in row):
                continue
            # (b + w)^j b^k = sum_p C(j, p) w^p b^(j - p + k)
            for p in range(j + 1):
                out[p, j - p : j - p + kb + 1] += comb(j, p) * row
        return self._new(out)

    def undo_diagonal_substitute(self):
        """Inverse of :meth:`diagonal_substitute`: substitute ``w = a - b``."""
        kw, kb = self.orders
        out = self.ring.zeros((kw + 1, kw + kb + 1))
        for p in range(kw + 1):
            row = self.coeffs[p]
            if all(v == 0 for v in row):
                continue
            # (a - b)^p b^q = sum_r C(p, r) a^r (-b)^(p - r) b^q
            for r in range(p + 1):
                sign = -1 if (p - r) % 2 else 1
                out[r, p - r : p - r + kb + 1] += (sign * comb(p, r)) * row
        return self._new(out)

    def divide_by_power(self, p, tol=None):
        """Divide by ``w**p`` (first variable); low coefficients must vanish."""
        if p > self.orders[0]:
            raise NotDivisibleError(f"cannot divide order-{self.orders[0]} jet by w^{p}")
        scale = 1 if self.ring.exact else self.max_abs()
        for j in range(p):
            for k in range(self.orders[1] + 1):
                v = self.coeffs[j, k]
                if not self.ring.is_zero(v, scale, tol):
                    raise NotDivisibleError(
                        f"not divisible by w^{p}: coefficient ({j},{k}) has magnitude {float(abs(v)):.3e}"
                    )
        return self._new(self.coeffs[p:].copy())

    def partials(self):
        """``(dG/dw, (d/db - d/dw) G)``.

        With ``w = t0 - t1`` and ``b = t1 - t``, these are ``d/dt0`` and
        ``d/dt1``.
        """
        ka, kb = self.orders
        if ka < 1 or kb < 1:
            raise DomainError(f"partials need orders >= 1, got {self.orders}")
        fw = self.ring.asarray(list(range(1, ka + 1))).reshape(-1, 1)
        fb = self.ring.asarray(list(range(1, kb + 1))).reshape(1, -1)
        dw = self.coeffs[1:] * fw
        db = self.coeffs[:, 1:] * fb
        mixed = db[: ka, :] - dw[:, : kb]
        return self._new(dw), self._new(mixed)

    def ln(self):
        """Logarithm, computed row by row as a series in ``w`` over b-jets."""
        c00 = self.coeffs[0, 0]
        if c00 <= 0 or self.ring.is_zero(c00, 1 if self.ring.exact else self.max_abs()):
            raise DomainError(f"ln needs a positive constant term, got {c00}")
        ka, kb = self.orders
        rows = [_make(Jet, self.coeffs[p].copy(), self.ring, self.base[1]) for p in range(ka + 1)]
        inv0 = rows[0].reciprocal()
        f = [rows[0].ln()]
        for p in range(1, ka + 1):
            acc = rows[p] * p
            for i in range(1, p):
                acc = acc - f[i] * rows[p - i] * i
            f.append(acc * inv0 / p)
        return self._new(np.stack([fi.coeffs for fi in f]))


def derive(j):
    return j.derive()


def reciprocal(j):
    return j.reciprocal()


def ln(j):
    return j.ln()


def sqrt(j):
    return j.sqrt()


def valuation(j, tol=None):
    return j.valuation(tol)


def diagonal_substitute(d):
    return d.diagonal_substitute()


def divide_by_power(d, variable="first", p=1, tol=None):
    if variable != "first":
        raise ValueError("only division in the first variable is supported")
    return d.divide_by_power(p, tol)


def partials(g):
    return g.partials()
