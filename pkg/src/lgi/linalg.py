"""Linear algebra over the two coefficient rings, pointwise and on jets.

Float rank decisions use QR with column pivoting and count diagonal
entries above ``tol`` times the largest column norm.  Rational matrices go
through exact Gauss-Jordan elimination.

The jet routines freeze a pivot pattern chosen on the constant term and
carry it to all higher coefficients, which yields smooth families (of
inverses, kernels) near a generic point.
"""

import numpy as np
import scipy.linalg

from .errors import RankError
from .rings import FLOAT, RATIONAL
from .series import Jet, _make


def ring_of(a):
    return RATIONAL if np.asarray(a).dtype == object else FLOAT


def _tol(ring, tol):
    return ring.tol if tol is None else tol


# -- exact elimination ----------------------------------------------------
def _rref_exact(a):
    """Reduced row echelon form; returns (R, pivot_rows_in_original, pivot_cols)."""
    r = np.array(a, dtype=object, copy=True)
    nrows, ncols = r.shape
    row_ids = list(range(nrows))
    pivots = []
    prow = 0
    for col in range(ncols):
        if prow >= nrows:
            break
        sel = None
        for i in range(prow, nrows):
            if r[i, col] != 0:
                sel = i
                break
        if sel is None:
            continue
        if sel != prow:
            r[[prow, sel]] = r[[sel, prow]]
            row_ids[prow], row_ids[sel] = row_ids[sel], row_ids[prow]
        r[prow] = r[prow] / r[prow, col]
        for i in range(nrows):
            if i != prow and r[i, col] != 0:
                r[i] = r[i] - r[i, col] * r[prow]
        pivots.append((row_ids[prow], col))
        prow += 1
    return r, pivots


def _float_rank(a, tol):
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return 0, np.arange(a.shape[1] if a.ndim == 2 else 0)
    _, rr, perm = scipy.linalg.qr(a, mode="economic", pivoting=True)
    d = np.abs(np.diag(rr))
    if d.size == 0 or d[0] == 0:
        return 0, perm
    return int(np.sum(d > tol * d[0])), perm


def rank(a, tol=None):
    a = np.asarray(a)
    if a.size == 0:
        return 0
    ring = ring_of(a)
    if ring.exact:
        return len(_rref_exact(a)[1])
    return _float_rank(a, _tol(ring, tol))[0]


def pivot_pattern(a, tol=None):
    """Rows and columns of a maximal well-conditioned square submatrix."""
    a = np.asarray(a)
    ring = ring_of(a)
    if ring.exact:
        _, piv = _rref_exact(a)
        rows = sorted(p[0] for p in piv)
        cols = [p[1] for p in piv]
        return rows, cols
    tol = _tol(ring, tol)
    r, perm = _float_rank(a, tol)
    cols = sorted(perm[:r].tolist())
    if r == 0:
        return [], []
    _, rperm = _float_rank(a[:, cols].T, tol)
    rows = sorted(rperm[:r].tolist())
    return rows, cols


def column_basis(a, tol=None):
    """Independent subset of the columns of ``a`` spanning its column space."""
    _, cols = pivot_pattern(a, tol)
    return np.asarray(a)[:, cols]


def nullspace(a, tol=None):
    """Basis (as columns) of the kernel of ``a``."""
    a = np.asarray(a)
    ring = ring_of(a)
    n = a.shape[1]
    if ring.exact:
        r, piv = _rref_exact(a)
        pcols = [p[1] for p in piv]
        free = [c for c in range(n) if c not in pcols]
        out = RATIONAL.zeros((n, len(free)))
        for k, f in enumerate(free):
            out[f, k] = RATIONAL.one
            for i, pc in enumerate(pcols):
                out[pc, k] = -r[i, f]
        return out
    rk = rank(a, tol)
    if a.shape[0] == 0:
        return np.eye(n)
    _, _, vt = np.linalg.svd(np.asarray(a, dtype=np.float64))
    return vt[rk:].T.copy()


def solve(a, b):
    a = np.asarray(a)
    ring = ring_of(a)
    if not ring.exact:
        return np.linalg.solve(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
    n = a.shape[0]
    b = np.asarray(b, dtype=object)
    vec = b.ndim == 1
    bb = b.reshape(n, -1)
    aug = np.concatenate([a, bb], axis=1)
    r, piv = _rref_exact(aug)
    if len(piv) < n or any(c >= n for _, c in piv[:n]):
        raise RankError("singular matrix in exact solve")
    x = r[:n, n:]
    return x[:, 0].copy() if vec else x.copy()


def inv(a):
    a = np.asarray(a)
    ring = ring_of(a)
    if not ring.exact:
        a = np.asarray(a, dtype=np.float64)
        if rank(a) < a.shape[0]:
            raise RankError("matrix is singular to working tolerance")
        return np.linalg.inv(a)
    return solve(a, RATIONAL.eye(a.shape[0]))


def det(a):
    a = np.asarray(a)
    ring = ring_of(a)
    if not ring.exact:
        return float(np.linalg.det(np.asarray(a, dtype=np.float64)))
    r = np.array(a, dtype=object, copy=True)
    n = r.shape[0]
    out = RATIONAL.one
    for col in range(n):
        sel = next((i for i in range(col, n) if r[i, col] != 0), None)
        if sel is None:
            return RATIONAL.zero
        if sel != col:
            r[[col, sel]] = r[[sel, col]]
            out = -out
        out = out * r[col, col]
        for i in range(col + 1, n):
            if r[i, col] != 0:
                r[i] = r[i] - (r[i, col] / r[col, col]) * r[col]
    return out


def same_span(a, b, tol=None):
    a = np.asarray(a)
    b = np.asarray(b)
    ra, rb = rank(a, tol), rank(b, tol)
    return ra == rb == rank(np.concatenate([a, b], axis=1), tol)


def det_generic(entries):
    """Cofactor expansion over any commutative ring elements (jets, Jet2)."""
    n = len(entries)
    if n == 1:
        return entries[0][0]
    if n == 2:
        return entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in entries[1:]]
        term = entries[0][j] * det_generic(minor)
        if total is None:
            total = term
        elif j % 2:
            total = total - term
        else:
            total = total + term
    return total


# -- jets -----------------------------------------------------------------
def jet_det(a):
    """Determinant of a square matrix jet, as a scalar jet."""
    n = a.shape[0]
    return det_generic([[a[i, j] for j in range(n)] for i in range(n)])


def jet_inv(a):
    """Inverse of a square matrix jet with invertible constant term."""
    ring = a.ring
    c = a.coeffs
    x0 = inv(c[0])
    out = ring.zeros(c.shape)
    out[0] = x0
    for n in range(1, a.order + 1):
        acc = c[1] @ out[n - 1]
        for p in range(2, n + 1):
            acc = acc + c[p] @ out[n - p]
        out[n] = -(x0 @ acc)
    return _make(Jet, out, ring, a.base)


def jet_solve(a, b):
    return jet_inv(a) @ b


def jet_rank(a, tol=None):
    """Rank of the constant term of a matrix jet."""
    return rank(a.value, tol)


def jet_nullspace(a, tol=None, check=True):
    """Smooth kernel basis of a matrix jet with a frozen pivot pattern.

    The pivot rows and columns are chosen on the constant term.  Each free
    column ``f`` contributes one basis jet with a 1 in slot ``f``, zeros in
    the other free slots and the pivot slots solved for.  The remaining
    rows are assumed to stay dependent near the base point; with
    ``check=True`` this is verified on the whole jet.

    Returns a jet of shape ``(n, n - rank)``.
    """
    ring = a.ring
    nrows, n = a.shape
    rows, cols = pivot_pattern(a.value, tol)
    free = [c for c in range(n) if c not in cols]
    k = len(free)
    out = ring.zeros((a.order + 1, n, k))
    for i, f in enumerate(free):
        out[0, f, i] = ring.one
    basis = _make(Jet, out, ring, a.base)
    if cols:
        sub = a[np.ix_(rows, cols)]
        rhs = a[np.ix_(rows, free)]
        xp = -(jet_inv(sub) @ rhs)
        basis.coeffs[:, cols, :] = xp.coeffs
    if check and k:
        resid = a @ basis
        scale = max(a.max_abs(), 1e-300)
        for v in resid.coeffs.reshape(-1):
            if not ring.is_zero(v, scale, None if tol is None else tol):
                raise RankError(
                    f"kernel pivot pattern does not persist along the jet (residual {float(abs(v)):.3e})"
                )
    return basis
