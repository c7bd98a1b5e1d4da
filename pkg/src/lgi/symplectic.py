"""The coordinate symplectic space ``R^{2m}`` and its Darboux frames.

Vectors split as ``(x, y)`` with ``x`` the first ``m`` coordinates, and the
form is ``sigma(u, v) = u^T J v`` with ``J = [[0, -I], [I, 0]]``.  With this
choice the standard basis ``e_1..e_m, f_1..f_m`` satisfies
``sigma(f_i, e_j) = delta_ij`` and ``sigma(e_i, e_j) = sigma(f_i, f_j) = 0``.

Vectors, families of vectors and frames may be plain arrays or jets.  A
set of vectors is always stored as the columns of a ``2m x p`` matrix.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

from . import linalg
from .errors import RankError
from .rings import FLOAT, RATIONAL, get_ring
from .series import Jet, jet_concat

__all__ = [
    "DarbouxFrame",
    "DarbouxReport",
    "b_map",
    "is_darboux",
    "j_matrix",
    "random_symplectic",
    "rational_symplectic",
    "sigma",
    "skew_complement",
    "symplectic_residual",
]


def j_matrix(m, ring=FLOAT):
    """The matrix ``J`` of the form for half-dimension ``m``."""
    ring = get_ring(ring)
    out = ring.zeros((2 * m, 2 * m))
    for i in range(m):
        out[i, m + i] = -ring.one
        out[m + i, i] = ring.one
    return out


def _apply_j(v):
    """``J v`` for a vector, matrix or jet thereof (axis -2 or -1 is 2m)."""
    if isinstance(v, Jet):
        c = v.coeffs
        axis = 1
    else:
        c = np.asarray(v)
        axis = 0
    n = c.shape[axis]
    if n % 2:
        raise ValueError(f"odd ambient dimension {n}")
    m = n // 2
    x = np.take(c, range(m), axis=axis)
    y = np.take(c, range(m, n), axis=axis)
    out = np.concatenate([-y, x], axis=axis)
    if isinstance(v, Jet):
        return v._new(out)
    return out


def sigma(u, v):
    """The pairing ``u^T J v``.

    For vectors returns a scalar (or scalar jet); for ``2m x p`` and
    ``2m x q`` matrices returns the ``p x q`` matrix of pairings.
    """
    ushape = u.shape
    vshape = v.shape
    if ushape[0] != vshape[0]:
        raise ValueError(f"dimension mismatch: {ushape[0]} vs {vshape[0]}")
    jv = _apply_j(v)
    if isinstance(u, Jet) or isinstance(jv, Jet):
        if not isinstance(u, Jet):
            return u.T @ jv if u.ndim == 2 else _dot_const(u, jv)
        if len(ushape) == 1 and len(vshape) == 1:
            return u._new((u * jv).coeffs.sum(axis=1))
        return u.T @ jv
    u = np.asarray(u)
    if u.ndim == 1 and jv.ndim == 1:
        return u @ jv
    return u.T @ jv


def _dot_const(u, jv):
    return jv._new(np.tensordot(jv.coeffs, u, axes=([1], [0])))


@dataclass
class DarbouxFrame:
    """A frame ``(E_1..E_m, F_1..F_m)`` stored as two ``2m x m`` matrices.

    Both blocks are jets (or plain arrays for a frame at one point); the
    columns are the vectors.
    """

    E: object
    F: object
    sign: int = 1

    @property
    def m(self):
        return self.E.shape[1]

    def matrix(self):
        """The ``2m x 2m`` matrix with columns ``E_1..E_m, F_1..F_m``."""
        if isinstance(self.E, Jet):
            return jet_concat([self.E, self.F], axis=1)
        return np.concatenate([self.E, self.F], axis=1)

    def __neg__(self):
        return DarbouxFrame(-self.E, -self.F, self.sign)

    def evaluate(self, h):
        return DarbouxFrame(self.E.evaluate(h), self.F.evaluate(h), self.sign)


@dataclass
class DarbouxReport:
    ok: bool
    residual: float
    worst: tuple

    def __bool__(self):
        return self.ok


def _max_residual(block):
    if isinstance(block, Jet):
        arr = block.coeffs
    else:
        arr = np.asarray(block)
    if arr.size == 0:
        return 0.0, ()
    flat = np.array([float(abs(v)) for v in arr.reshape(-1)]).reshape(arr.shape)
    idx = np.unravel_index(int(np.argmax(flat)), flat.shape)
    return float(flat[idx]), tuple(int(i) for i in idx)


def darboux_defect(frame):
    """``Phi^T J Phi - J`` for the frame matrix ``Phi``, as jet or array."""
    phi = frame.matrix()
    ring = phi.ring if isinstance(phi, Jet) else linalg.ring_of(phi)
    gram = sigma(phi, phi)
    return gram - j_matrix(frame.m, ring)


def is_darboux(frame, tol=1e-9):
    """Check every pairing of ``frame`` against the Darboux values.

    Checks ``sigma(E_i, E_j) = sigma(F_i, F_j) = 0`` and
    ``sigma(F_i, E_j) = delta_ij`` on all retained jet coefficients.

    Returns
    -------
    DarbouxReport
        Truthy when the worst absolute residual is at most ``tol`` (exact
        zero on the rational ring).
    """
    defect = darboux_defect(frame)
    res, worst = _max_residual(defect)
    exact = (defect.ring if isinstance(defect, Jet) else linalg.ring_of(defect)).exact
    ok = res == 0 if exact else res <= tol
    return DarbouxReport(bool(ok), res, worst)


def skew_complement(basis, tol=None):
    """Basis (columns) of ``{v : sigma(v, l) = 0 for all l in span(basis)}``."""
    basis = np.asarray(basis)
    n, p = basis.shape
    if p and linalg.rank(basis, tol) < p:
        raise RankError("skew_complement needs linearly independent input vectors")
    if p == 0:
        return linalg.ring_of(basis).eye(n) if basis.dtype == object else np.eye(n)
    # sigma(v, l) = v^T J l, so v ranges over the kernel of (J l)^T
    constraints = _apply_j(basis).T
    return linalg.nullspace(constraints, tol)


def b_map(lam0, lam1, tol=None):
    """Matrix of ``v -> sigma(v, .)|_{lam0}`` for ``v`` in ``lam1``.

    Entry ``(j, i)`` is ``sigma(v_i, u_j)`` where ``u`` and ``v`` are the
    supplied bases (columns) of ``lam0`` and ``lam1``.  For the coordinate
    pair ``lam0 = span(e)``, ``lam1 = span(f)`` this is the identity.
    """
    lam0 = np.asarray(lam0)
    lam1 = np.asarray(lam1)
    mat = sigma(lam1, lam0).T
    if linalg.rank(mat, tol) < mat.shape[0]:
        raise RankError("subspaces are not transversal")
    return mat


def random_symplectic(m, seed=0, factors=6, scale=0.5):
    """Seeded random symplectic matrix of size ``2m``.

    The product of ``factors`` exponentials ``expm(J S)`` with ``S``
    symmetric and entries uniform in ``[-scale, scale]``.

    Notes
    -----
    With ``scale = 1`` the product of six factors often has entries in the
    hundreds, and then ``M^T J M - J`` cannot be evaluated below ``1e-12``
    in double precision.  The default ``0.5`` keeps entries around 10 and
    the residual near ``1e-13``.
    """
    if not 0 <= scale <= 1:
        raise ValueError("scale must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    j = j_matrix(m)
    out = np.eye(2 * m)
    for _ in range(factors):
        a = rng.uniform(-scale, scale, size=(2 * m, 2 * m))
        s = np.triu(a) + np.triu(a, 1).T
        out = out @ scipy.linalg.expm(j @ s)
    return out


def rational_symplectic(mat, max_denominator=None):
    """Exactly symplectic rational matrix next to a float symplectic ``mat``.

    Uses the Cayley parametrisation: ``X = 2 (M - I)(M + I)^{-1}`` is
    Hamiltonian up to rounding, so it is read off in exact rationals,
    projected onto the Hamiltonian matrices (``-J X`` symmetrised) and mapped
    back with ``(I - X/2)^{-1} (I + X/2)``, which is symplectic for every
    Hamiltonian ``X``.  The result is within rounding of ``mat``.

    Parameters
    ----------
    mat : ndarray
        Float symplectic matrix, e.g. from :func:`random_symplectic`.
    max_denominator : int, optional
        Round the entries of ``X`` to fractions with at most this
        denominator.  The output is still exactly symplectic; it just
        moves away from ``mat`` by about ``1 / max_denominator`` and keeps
        later exact arithmetic cheap.

    Raises
    ------
    RankError
        If ``-1`` is an eigenvalue of ``mat`` (the Cayley chart misses it).

    Examples
    --------
    >>> m = rational_symplectic(random_symplectic(1, seed=3))
    >>> symplectic_residual(m)
    0.0
    """
    mat = np.asarray(mat, dtype=float)
    n = mat.shape[0]
    eye = np.eye(n)
    if np.linalg.cond(mat + eye) > 1e12:
        raise RankError("-1 is an eigenvalue; no Cayley parameter")
    x = np.linalg.solve((mat + eye).T, 2.0 * (mat - eye).T).T
    def snap(v):
        f = Fraction(float(v))
        return f.limit_denominator(max_denominator) if max_denominator else f

    xq = RATIONAL.asarray([[snap(v) for v in row] for row in x])
    j = j_matrix(n // 2, RATIONAL)
    s = -(j @ xq)
    half = RATIONAL.coerce("1/2")
    s = (s + s.T) * half
    hx = (j @ s) * half
    eye_q = RATIONAL.eye(n)
    return linalg.solve(eye_q - hx, eye_q + hx)


def symplectic_residual(mat):
    """``max |M^T J M - J|``."""
    mat = np.asarray(mat)
    m = mat.shape[0] // 2
    j = j_matrix(m, linalg.ring_of(mat))
    return float(np.max(np.abs(mat.T @ j @ mat - j)))
