"""Laurent analysis of a curve in the affine space of transversal subspaces.

Coordinates
-----------
Fix a point ``tau`` and shear coordinates by ``(x, y) -> (x, y - S(tau) x)``
so that ``L(tau)`` becomes the ``x``-plane.  A Lagrangian subspace
transversal to it is ``{(Q y, y)}`` for a symmetric ``Q``, and the
difference of two such subspaces in the affine structure is the quadratic
form ``l -> l^T (Q_D - Q_G) l`` on the dual of ``L(tau)``.  For ``t != tau``
the curve itself has ``Q(t) = G(t) = (S(t) - S(tau))^{-1}``, a Laurent
series with a pole at ``tau``.

* The derivative subspace is ``{(G_0 y, y)}`` where ``G_0`` is the free term
  of ``G``.
* ``d/dt`` of the curve in the affine space is ``G S' G``.  For a rank 1
  curve ``S' = s phi phi^T`` with ``s = +-1``, so the velocity is
  ``s (G phi)(G phi)^T``.  The vector ``w = G phi`` has a pole of order
  ``m`` and its singular Laurent coefficients give a basis ``e_1..e_m`` of
  ``L(tau)``: ``e_i`` is the coefficient of ``(t - tau)^(i - 1 - m)``.
* ``f_1..f_m`` is the basis of the derivative subspace dual to ``e``.

The velocity is nonnegative for increasing curves in these conventions
(``s = +1``); the sign is reported rather than forced.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .curves import _at, chart_matrix, to_graph, weight
from .errors import RankError, StructureError
from .frame import canonical_frame
from .rings import FLOAT, get_ring
from .series import Jet, _make
from .symplectic import DarbouxFrame, b_map, is_darboux, sigma

__all__ = [
    "LaurentFrame",
    "DerivativeSubspace",
    "Laurent",
    "ProportionalityReport",
    "WFunction",
    "affine_subtract",
    "laurent_frame",
    "compare_frames",
    "derivative_subspace",
    "w_function",
]

#: Relative magnitude below which a Laurent coefficient counts as zero.
POLE_RTOL = 1e-7


class Laurent:
    """Truncated Laurent series ``sum_n c_n (t - tau)^(low + n)``.

    Parameters
    ----------
    coeffs : array_like
        Leading axis indexes the powers; trailing axes are the value shape.
    low : int
        Power of the first coefficient.
    """

    def __init__(self, coeffs, low, ring=FLOAT, base=0):
        self.ring = get_ring(ring)
        self.coeffs = coeffs if isinstance(coeffs, np.ndarray) else self.ring.asarray(coeffs)
        self.low = low
        self.base = base

    @classmethod
    def from_jet(cls, jet, low):
        """``jet * (t - tau)^low``."""
        return cls(jet.coeffs, low, jet.ring, jet.base)

    @property
    def high(self):
        """Highest retained power."""
        return self.low + self.coeffs.shape[0] - 1

    def __repr__(self):
        return f"Laurent(powers {self.low}..{self.high}, shape={self.coeffs.shape[1:]})"

    def coefficient(self, power):
        """Coefficient of ``(t - tau)^power`` (zero below ``low``)."""
        if power > self.high:
            raise IndexError(f"power {power} beyond retained order {self.high}")
        if power < self.low:
            return self.ring.zeros(self.coeffs.shape[1:])
        return self.coeffs[power - self.low]

    def pole_order(self, rtol=POLE_RTOL):
        """Order of the pole, ``0`` if the singular part vanishes.

        Coefficients are compared with the largest singular coefficient
        (or the largest coefficient when the part is empty).
        """
        mags = [_magnitude(self.coefficient(p)) for p in range(self.low, 0)]
        if not mags:
            return 0
        scale = max(mags)
        if scale == 0:
            return 0
        for p, mag in zip(range(self.low, 0), mags):
            if mag > rtol * scale:
                return -p
        return 0


def _magnitude(c):
    arr = np.asarray(c)
    if arr.size == 0:
        return 0.0
    return max(float(abs(v)) for v in arr.reshape(-1))


# -- affine structure ----------------------------------------------------------
def affine_subtract(gamma, delta, lam, tol=None):
    """Difference ``gamma - delta`` of two subspaces transversal to ``lam``.

    Parameters
    ----------
    gamma, delta, lam : array_like
        ``2m x m`` bases.

    Returns
    -------
    ndarray
        Symmetric ``m x m`` matrix of the quadratic form
        ``l -> sigma(B_gamma^{-1} l, B_delta^{-1} l)`` on the dual of ``lam``,
        in the basis dual to the given basis of ``lam``.  Here ``B_gamma``
        sends ``v`` in ``gamma`` to ``sigma(v, .)`` restricted to ``lam``.

    Raises
    ------
    RankError
        If ``gamma`` or ``delta`` is not transversal to ``lam``.

    Examples
    --------
    With ``lam`` the ``x``-axis, ``gamma = span(1, 2)`` and ``delta = span(1, 4)``
    the difference is ``1/4 - 1/2``:

    >>> import numpy as np
    >>> lam = np.array([[1.0], [0.0]])
    >>> float(affine_subtract(np.array([[1.0], [2.0]]), np.array([[1.0], [4.0]]), lam)[0, 0])
    -0.25
    """
    gamma = np.asarray(gamma)
    delta = np.asarray(delta)
    lam = np.asarray(lam)
    # columns of gamma @ inv(B): the preimages of the dual basis vectors
    pg = gamma @ linalg.inv(b_map(lam, gamma, tol))
    pd = delta @ linalg.inv(b_map(lam, delta, tol))
    form = sigma(pg, pd)
    if linalg.ring_of(form).exact:
        return form
    return (form + form.T) / 2


# -- Laurent data at one point -----------------------------------------------
def _adjugate(t):
    m = t.shape[0]
    if m == 1:
        return Jet.constant(t.ring.one, t.order, t.ring, t.base).coeffs.reshape(-1, 1, 1), t.order
    entries = [[t[i, j] for j in range(m)] for i in range(m)]
    out = t.ring.zeros((t.order + 1, m, m))
    for i in range(m):
        for j in range(m):
            minor = [row[:i] + row[i + 1 :] for r, row in enumerate(entries) if r != j]
            c = linalg.det_generic(minor)
            out[:, i, j] = c.coeffs if (i + j) % 2 == 0 else -c.coeffs
    return out, t.order


@dataclass
class DerivativeSubspace:
    """The derivative subspace at ``tau`` and the Laurent data behind it.

    Attributes
    ----------
    tau : scalar
    weight : int
    basis : ndarray
        ``2m x m`` basis of the derivative subspace (standard coordinates).
    inverse : Laurent
        ``(S(t) - S(tau))^{-1}`` in the graph chart of the curve.
    chart : tuple
        Chart of the graph coordinates.
    free_term_residual : float
        Discrepancy between the free term of ``L(t) - D`` for a reference
        ``D`` and ``affine_subtract(L0, D, L(tau))``; zero up to rounding.
    """

    tau: object
    weight: int
    basis: np.ndarray
    inverse: Laurent
    chart: tuple
    lam_basis: np.ndarray
    free_term_residual: float = 0.0


def _to_standard(vecs, chart, ring):
    if not chart:
        return vecs
    m = vecs.shape[0] // 2
    return chart_matrix(m, chart, ring).T @ vecs


def _inverse_laurent(g, k):
    s = g.S
    t = s - s.value
    det = linalg.jet_det(t)
    ring = g.ring
    if det.order < 2 * k:
        raise StructureError(f"jet order {g.order} too short for weight {k}; need at least {2 * k}")
    d = _make(Jet, det.coeffs[k:].copy(), ring, g.base)
    adj, _ = _adjugate(t)
    a = _make(Jet, adj[: d.order + 1], ring, g.base) * d.reciprocal()
    return Laurent.from_jet(a, -k)


def derivative_subspace(c, tau=None, k=None, tol=None):
    """Derivative subspace of an ample graph curve at ``tau``.

    Parameters
    ----------
    c : GraphCurve or other local curve
        Jet at ``tau`` of order at least ``2k``, ``k`` the weight.

    Returns
    -------
    DerivativeSubspace
    """
    g = _at(to_graph(c), tau)
    ring = g.ring
    m = g.m
    if k is None:
        k = weight(g, tol=tol)
    inv = _inverse_laurent(g, k)
    g0 = inv.coefficient(0)
    s0 = g.S.value
    eye = ring.eye(m)
    lam0_chart = np.concatenate([g0, eye + s0 @ g0], axis=0)
    lam_chart = np.concatenate([eye, s0], axis=0)
    lam0 = _to_standard(lam0_chart, g.chart, ring)
    lam = _to_standard(lam_chart, g.chart, ring)
    # check against an independent reference: D = {(0, y)} sheared, i.e. Q_D = 0
    ref = _to_standard(np.concatenate([ring.zeros((m, m)), eye], axis=0), g.chart, ring)
    expected = -g0
    got = affine_subtract(lam0, ref, lam, tol)
    resid = _magnitude(np.asarray(got - expected, dtype=object if ring.exact else float))
    return DerivativeSubspace(g.base, k, lam0, inv, g.chart, lam, resid)


@dataclass
class WFunction:
    """Laurent expansion of ``w(t, tau)`` and the basis read off from it.

    Attributes
    ----------
    w : Laurent
        Vector Laurent series in the ``x`` coordinates of ``L(tau)``.
    pole_order : int
    e : ndarray
        ``2m x m``; column ``i`` is the coefficient of ``(t - tau)^(i - m)``
        (0-based ``i``), mapped into standard coordinates.
    sign : int
        Sign of the velocity form: the curve velocity in the affine space
        is ``sign * w w^T``.
    """

    tau: object
    w: Laurent
    pole_order: int
    e: np.ndarray
    sign: int
    weight: int


def _rank_one_factor(ds, tol):
    """``phi`` with ``ds = sign * phi phi^T``, ``phi_j > 0`` for the pivot ``j``."""
    diag = ds.value.diagonal()
    mags = [float(abs(v)) for v in diag]
    j = int(np.argmax(mags))
    djj = ds[j, j]
    c0 = djj.coeffs[0]
    sign = 1 if c0 > 0 else -1
    root = (djj * sign).sqrt()
    phi = ds[:, j] / root * sign
    return phi, sign, j


def w_function(c, tau=None, k=None, tol=None):
    """Laurent expansion of ``w(t, tau)`` and the basis ``e_1..e_m``.

    Raises
    ------
    RankError
        If the velocity is not of rank 1 beyond tolerance.
    StructureError
        If the pole order differs from ``m``.
    """
    g = _at(to_graph(c), tau)
    ring = g.ring
    m = g.m
    if k is None:
        k = weight(g, tol=tol)
    ds = g.S.derive()
    if linalg.rank(ds.value, tol) != 1:
        raise RankError(f"velocity has rank {linalg.rank(ds.value, tol)}, expected 1")
    phi, sign, _ = _rank_one_factor(ds, tol)
    # rank 1 to all retained orders
    resid = ds - (phi[:, None] * phi[None, :]) * sign
    if not ring.exact and resid.max_abs() > 1e-8 * max(ds.max_abs(), 1.0):
        raise RankError(f"velocity is not rank 1 along the jet (residual {resid.max_abs():.3e})")
    if ring.exact and resid.max_abs() != 0:
        raise RankError("velocity is not rank 1 along the jet")
    inv = _inverse_laurent(g, k)
    a = _make(Jet, inv.coeffs, ring, g.base)
    wjet = a @ phi.truncate(a.order) if phi.order >= a.order else a.truncate(phi.order) @ phi
    w = Laurent.from_jet(wjet, -k)
    p = w.pole_order()
    if p != m:
        raise StructureError(f"w has a pole of order {p}, expected {m}")
    s0 = g.S.value
    cols = [w.coefficient(i - m) for i in range(m)]
    ex = np.stack(cols, axis=1)
    e = _to_standard(np.concatenate([ex, s0 @ ex], axis=0), g.chart, ring)
    return WFunction(g.base, w, p, e, sign, k)


@dataclass
class LaurentFrame:
    """Frame ``(e_1..e_m, f_1..f_m)`` with ``sigma(f_i, e_j) = delta_ij``."""

    tau: object
    e: np.ndarray
    f: np.ndarray
    darboux_residual: float
    derivative: DerivativeSubspace
    w: WFunction

    @property
    def frame(self):
        return DarbouxFrame(self.e, self.f)

    def to_dict(self):
        return {
            "tau": self.tau,
            "pole_order": self.w.pole_order,
            "weight": self.w.weight,
            "velocity_sign": self.w.sign,
            "residuals": {
                "darboux": self.darboux_residual,
                "free_term": self.derivative.free_term_residual,
            },
        }


def laurent_frame(c, tau=None, k=None, tol=None):
    """Frame built from ``w`` and the derivative subspace at ``tau``.

    Raises
    ------
    RankError
        If ``e_1..e_m`` do not span ``L(tau)``.
    """
    g = _at(to_graph(c), tau)
    if k is None:
        k = weight(g, tol=tol)
    wf = w_function(g, None, k, tol)
    ds = derivative_subspace(g, None, k, tol)
    e = wf.e
    if not linalg.same_span(e, ds.lam_basis, tol):
        raise RankError("e_1..e_m do not span the subspace of the curve")
    pair = sigma(ds.basis, e)
    f = ds.basis @ linalg.inv(pair).T
    rep = is_darboux(DarbouxFrame(e, f), 1e-9)
    return LaurentFrame(g.base, e, f, rep.residual, ds, wf)


@dataclass
class ProportionalityReport:
    """``e_1(tau) = s(tau) E_1(tau)`` over a grid of ``tau``.

    Attributes
    ----------
    taus, s : ndarray
    s_derivative : ndarray
        Central differences of ``s`` (one-sided at the ends).
    max_derivative : float
    parallel_residual : float
        Largest ``|e_1 - s E_1| / |e_1|``.
    constant : float
        Mean of ``s``.
    """

    taus: np.ndarray
    s: np.ndarray
    s_derivative: np.ndarray
    max_derivative: float
    parallel_residual: float
    constant: float
    pole_orders: list = field(default_factory=list)

    def to_dict(self):
        return {
            "tau": [float(t) for t in self.taus],
            "proportionality_constant": self.constant,
            "residuals": {"max_ds": self.max_derivative, "parallel": self.parallel_residual},
            "pole_order": self.pole_orders,
        }


def compare_frames(source, taus, order=None):
    """Compare ``e_1`` with the first canonical frame vector along a grid.

    Parameters
    ----------
    source : object with ``at(tau, order, ring)``
        For instance :class:`lgi.synthesis.LambdaCurve`.
    taus : sequence of float
        Increasing grid, at least three points.
    order : int, optional
        Jet order per point, default ``2 m^2 + 2m + 2``.

    Returns
    -------
    ProportionalityReport

    Notes
    -----
    ``w`` and the canonical frame are each fixed only up to a global sign,
    and the conventions that pick the sign at a single point need not be
    continuous in ``tau``.  Along the grid each vector is therefore
    flipped when needed to stay close to its value at the previous point.
    """
    taus = np.asarray(taus, dtype=float)
    if taus.size < 3:
        raise ValueError("need at least three grid points")
    m = source.m
    order = 2 * m * m + 2 * m + 2 if order is None else order
    svals, worst, poles = [], 0.0, []
    prev_e = prev_E = None
    for tau in taus:
        g = source.at(float(tau), order, FLOAT)
        af = laurent_frame(g)
        poles.append(af.w.pole_order)
        E1 = np.asarray(canonical_frame(g).frame.frame.E.value[:, 0], dtype=float)
        e1 = np.asarray(af.e[:, 0], dtype=float)
        # both vectors are defined up to sign; follow them continuously
        if prev_e is not None and e1 @ prev_e < 0:
            e1 = -e1
        if prev_E is not None and E1 @ prev_E < 0:
            E1 = -E1
        prev_e, prev_E = e1, E1
        s = float(e1 @ E1 / (E1 @ E1))
        worst = max(worst, float(np.linalg.norm(e1 - s * E1) / np.linalg.norm(e1)))
        svals.append(s)
    svals = np.array(svals)
    ds = np.gradient(svals, taus)
    return ProportionalityReport(taus, svals, ds, float(np.max(np.abs(ds))), worst, float(svals.mean()), poles)
