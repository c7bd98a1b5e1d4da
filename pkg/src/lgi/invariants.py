"""Classical invariants of curves of Lagrangian subspaces.

Generating function
-------------------
For a graph curve ``S(t)`` of weight ``k`` the function

    g(t0, t1) = d^2/dt0 dt1  ln( det(S(t0) - S(t1)) / (t0 - t1)^k )

is smooth near the diagonal.  It is expanded around ``(t, t)`` in the
variables ``w = t0 - t1`` and ``b = t1 - t``.  From a graph jet of order
``K`` the coefficient of ``w^p b^q`` is determined for ``p + q <= K - k - 2``
and those outside this triangle are stored as zero.  The principal
curvatures ``beta_i(t)`` are the coefficients of ``w^i`` at ``b = 0``.

Cross-ratio
-----------
For transversal Lagrangian subspaces ``L0, L1`` with tangent vectors given
as symmetric matrices ``V0, V1`` (quadratic forms in chosen bases), the
operator ``B10^{-1} V1 B01^{-1} V0`` acts on ``L0``.  Here ``Bij`` is the
map ``v -> sigma(v, .)`` from ``Lj`` to the dual of ``Li``.  Its trace has a
double pole ``-k / (t0 - t1)^2`` along a curve, and the remainder is
``-g(t0, t1)``.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .curves import GraphCurve, JetGraphSource, _at, to_graph, weight
from .errors import DomainError, NotDivisibleError, StructureError
from .frame import canonical_frame
from .rings import FLOAT, get_ring
from .series import Jet, Jet2, _make, jet_stack
from .symplectic import b_map

__all__ = [
    "CrossRatio",
    "GammaReport",
    "GeneratingFunction",
    "RelationEstimate",
    "TraceReport",
    "cross_ratio",
    "default_orders",
    "estimate_relation",
    "gamma_coefficients",
    "gamma_structure_check",
    "graph_cross_ratio",
    "generating_function",
    "principal_curvatures",
    "probe_lambda_beta",
    "trace_asymptotic_check",
]


def default_orders(m):
    """Default bivariate orders ``(m^2 + 2m, m^2 + 2m)``."""
    n = m * m + 2 * m
    return n, n


@dataclass
class GeneratingFunction:
    """Expansion of ``g`` around ``(t, t)``.

    Attributes
    ----------
    t : scalar
        Base point.
    k : int
        Weight used in the division.
    jet : Jet2
        Coefficients of ``g`` in ``(w, b) = (t0 - t1, t1 - t)``.
    degree : int
        Coefficients with ``p + q <= degree`` are determined.
    """

    t: object
    k: int
    jet: Jet2
    degree: int

    def beta(self, count=None):
        """``beta_0 .. beta_{count-1}`` at the base point."""
        col = self.jet.coeffs[: self.degree + 1, 0]
        if count is None:
            count = len(col)
        if count > len(col):
            raise DomainError(f"only {len(col)} coefficients available, {count} requested")
        return [col[i] for i in range(count)]

    def __call__(self, t0, t1):
        """Value of the truncated expansion at ``(t0, t1)``."""
        return self.jet.evaluate(t0 - t1, t1 - self.t)


def _difference_jet2(s):
    """Entries of ``S(t + a) - S(t + b)`` as bivariate jets."""
    ring = s.ring
    k = s.order
    m = s.shape[0]
    out = []
    for i in range(m):
        row = []
        for j in range(m):
            c = ring.zeros((k + 1, k + 1))
            col = s.coeffs[:, i, j]
            c[1:, 0] = col[1:]
            c[0, 1:] = -col[1:]
            row.append(_make(Jet2, c, ring, (0, 0)))
        out.append(row)
    return out


def _mask_triangle(c, degree, ring):
    ka, kb = c.shape
    for p in range(ka):
        for q in range(kb):
            if p + q > degree:
                c[p, q] = ring.zero
    return c


def generating_function(c, t=None, k=None, tol=None):
    """Expansion of the generating function ``g`` at ``(t, t)``.

    Parameters
    ----------
    c : GraphCurve or other local curve
        Jet of the curve; its order ``K`` bounds the result.
    t : scalar, optional
        Base point, default the base of ``c``.
    k : int, optional
        Weight; measured with :func:`lgi.curves.weight` when omitted.

    Returns
    -------
    GeneratingFunction
        Determined on ``p + q <= K - k - 2``.

    Raises
    ------
    NotDivisibleError
        If the determinant does not vanish to order ``k`` on the diagonal
        ("weight mismatch").
    """
    g = _at(to_graph(c), t)
    ring = g.ring
    if k is None:
        k = weight(g, tol=tol)
    order = g.order
    if order - k - 2 < 0:
        raise DomainError(f"jet order {order} is too short for weight {k}")
    d = linalg.det_generic(_difference_jet2(g.S))
    d = d.diagonal_substitute()
    top = order
    d = d._new(_mask_triangle(d.coeffs[: top + 1, : top + 1].copy(), top, ring))
    try:
        q = d.divide_by_power(k, tol)
    except NotDivisibleError as exc:
        measured = None
        for p in range(d.orders[0] + 1):
            if any(not ring.is_zero(v, 1 if ring.exact else d.max_abs(), tol) for v in d.coeffs[p]):
                measured = p
                break
        raise NotDivisibleError(f"weight mismatch: requested {k}, measured {measured}; {exc}") from None
    degree = top - k
    q = q.truncate(degree, degree)
    c0 = q.coeffs[0, 0]
    if ring.is_zero(c0, 1 if ring.exact else q.max_abs(), tol):
        raise NotDivisibleError(f"weight mismatch: the quotient by w^{k} vanishes on the diagonal")
    # a constant factor does not change the mixed derivative of the logarithm
    lg = (q / c0).ln()
    dw, _ = lg.partials()
    _, mixed = dw.partials()
    degree -= 2
    coeffs = _mask_triangle(mixed.coeffs[: degree + 1, : degree + 1].copy(), degree, ring)
    return GeneratingFunction(g.base, k, mixed._new(coeffs), degree)


def principal_curvatures(gf, count=None):
    """``beta_0 .. beta_{count-1}`` from a generating function.

    ``count`` defaults to every determined coefficient; for a rank 1 curve
    at the default orders that is ``2m - 1``, i.e. ``beta_0 .. beta_{2m-2}``.
    """
    return gf.beta(count)


# -- cross-ratio ------------------------------------------------------------
@dataclass
class CrossRatio:
    """Operator on the first subspace, in its chosen basis."""

    matrix: np.ndarray

    @property
    def trace(self):
        return sum(self.matrix[i, i] for i in range(self.matrix.shape[0]))


def cross_ratio(lam0, v0, lam1, v1, tol=None):
    """Infinitesimal cross-ratio of two tangent vectors.

    Parameters
    ----------
    lam0, lam1 : array_like
        ``2m x m`` bases of two transversal Lagrangian subspaces.
    v0, v1 : array_like
        Symmetric ``m x m`` matrices of the tangent vectors as quadratic
        forms in those bases.

    Returns
    -------
    CrossRatio

    Raises
    ------
    RankError
        If the subspaces are not transversal.

    Examples
    --------
    >>> import numpy as np
    >>> l0 = np.array([[1.0], [0.0]]); l1 = np.array([[1.0], [1.0]])
    >>> round(float(cross_ratio(l0, [[1.0]], l1, [[1.0]]).trace), 12)
    -1.0
    """
    lam0 = np.asarray(lam0)
    lam1 = np.asarray(lam1)
    v0 = np.asarray(v0)
    v1 = np.asarray(v1)
    b01 = b_map(lam0, lam1, tol)
    b10 = b_map(lam1, lam0, tol)
    op = linalg.solve(b10, v1 @ linalg.solve(b01, v0))
    return CrossRatio(op)


def graph_cross_ratio(diff, v0, v1):
    """Cross-ratio for two graphs ``L_i = {(x, S_i x)}`` from ``diff = S_0 - S_1``.

    In graph bases ``B01 = S_1 - S_0`` and ``B10 = S_0 - S_1``, so the operator
    is ``-diff^{-1} V1 diff^{-1} V0``.  Passing the difference directly
    avoids cancellation when ``S_0`` and ``S_1`` are close.
    """
    diff = np.asarray(diff)
    op = -linalg.solve(diff, np.asarray(v1) @ linalg.solve(diff, np.asarray(v0)))
    return CrossRatio(op)


@dataclass
class TraceReport:
    """Residuals of ``trace + k / (t0 - t1)^2 + g`` over a grid."""

    t: float
    k: int
    max_residual: float
    points: list = field(default_factory=list)

    def to_dict(self):
        return {"t": self.t, "k": self.k, "max_residual": self.max_residual}


def _as_source(c):
    if hasattr(c, "at"):
        return c
    return JetGraphSource(to_graph(c))


def trace_asymptotic_check(c, t=0.0, window=0.3, n=10, order=None, min_gap=0.01):
    """Compare the cross-ratio trace of a curve with its expansion.

    On an ``n x n`` grid of base points ``t1`` in ``[t - window/2, t + window/2]``
    and offsets ``t0 - t1`` of alternating sign with magnitudes from
    ``min_gap`` to ``window``, evaluates
    ``trace[S'(t0) | S'(t1)] + k/(t0 - t1)^2 + g(t0, t1)``.

    Both the trace and ``g`` are summed from the jet of the curve at
    ``t1``, so the check assumes the Taylor series converges on
    ``|t0 - t1| <= window``.

    Parameters
    ----------
    c : curve source or GraphCurve
        Anything with ``at(tau, order, ring)``; a plain graph jet is
        re-expanded, which is exact for polynomial jets only.
    order : int, optional
        Jet order at each ``t1``; default ``k + 26``.

    Returns
    -------
    TraceReport
    """
    src = _as_source(c)
    k = weight(src.at(t, 2 * src.m * src.m + 2, FLOAT))
    order = k + 26 if order is None else order
    base = t + np.linspace(-window / 2, window / 2, n)
    gaps = np.linspace(min_gap, window, n)
    worst = 0.0
    points = []
    for t1 in base:
        g1 = src.at(float(t1), order, FLOAT)
        gf = generating_function(g1, k=k)
        beta = np.array(gf.beta(), dtype=float)
        sc = np.asarray(g1.S.coeffs, dtype=float)
        powers = np.arange(sc.shape[0])
        for j, gap in enumerate(gaps):
            delta = gap if j % 2 == 0 else -gap
            # S(t0) - S(t1) and S'(t0) summed from the jet at t1
            diff = np.tensordot(delta ** powers[1:], sc[1:], axes=1)
            v0 = np.tensordot(powers[1:] * delta ** powers[:-1], sc[1:], axes=1)
            tr = float(graph_cross_ratio(diff, v0, sc[1]).trace)
            gval = float(np.polyval(beta[::-1], delta))
            res = tr + k / delta**2 + gval
            worst = max(worst, abs(res))
            points.append((float(t1 + delta), float(t1), res))
    return TraceReport(float(t), k, worst, points)


# -- relation between the two systems of invariants --------------------------
@dataclass
class RelationEstimate:
    """Ratio ``lam_i / beta_{2i-2}`` over a probe family.

    Attributes
    ----------
    i : int
    C : float
        Mean ratio.
    spread : float
        ``max - min`` of the ratios.
    ratios, lam, beta : list
        Per-curve values.
    lower_beta : list
        Per curve, ``beta_0 .. beta_{2i-4}``; these vanish on a family
        whose lower curvatures vanish.
    """

    i: int
    C: float
    spread: float
    ratios: list
    lam: list
    beta: list
    lower_beta: list
    m: int = 0

    def to_dict(self):
        return {"i": self.i, "C_i": self.C, "spread": self.spread}


def estimate_relation(curves, i, tol=1e-10):
    """Estimate ``C_i`` from graph jets of curves whose ``lam_1..lam_{i-1}`` vanish.

    Parameters
    ----------
    curves : list of GraphCurve
        Jets at the evaluation point, long enough for ``beta_{2i-2}``.
    i : int
        1-based curvature index.

    Raises
    ------
    StructureError
        If some ``beta_{2i-2}`` vanishes ("degenerate probe").
    """
    ratios, lams, betas, lower = [], [], [], []
    m = None
    for c in curves:
        g = to_graph(c)
        m = g.m
        lam = canonical_frame(g).lam
        gf = generating_function(g)
        beta = [float(x) for x in gf.beta(2 * i - 1)]
        li = float(lam[i - 1].coeffs[0])
        bi = beta[2 * i - 2]
        if abs(bi) <= tol:
            raise StructureError(f"degenerate probe: beta_{2 * i - 2} = {bi:.3e}")
        ratios.append(li / bi)
        lams.append(li)
        betas.append(bi)
        lower.append(beta[: 2 * i - 2])
    ratios_arr = np.array(ratios)
    return RelationEstimate(
        i, float(ratios_arr.mean()), float(ratios_arr.max() - ratios_arr.min()), ratios, lams, betas, lower, m or 0
    )


def probe_lambda_beta(m, values, i=None, t0=0, ring=FLOAT, order=None):
    """Estimate ``C_i`` on synthesized curves with ``lam_i = c``, others zero.

    Parameters
    ----------
    m : int
    values : iterable of scalars
        The constants ``c``; each gives one curve.
    i : int or list of int, optional
        Curvature indices to probe, default ``m``.
    order : int, optional
        Graph jet order, default ``m^2 + 2m + 2``.

    Returns
    -------
    list of RelationEstimate
        One entry per index.
    """
    from .synthesis import CurvatureSpec, synthesize_local
    from .curves import graph_from_frame

    indices = [m] if i is None else ([i] if isinstance(i, int) else list(i))
    order = m * m + 2 * m + 2 if order is None else order
    out = []
    for idx in indices:
        if not 1 <= idx <= m:
            raise ValueError(f"curvature index must lie in 1..{m}")
        curves = []
        for c in values:
            rho = ["0"] * m
            rho[idx - 1] = str(c)
            fc = synthesize_local(CurvatureSpec(rho), t0, order, ring)
            curves.append(graph_from_frame(fc))
        out.append(estimate_relation(curves, idx))
    return out


# -- Gamma coefficients --------------------------------------------------------
def gamma_coefficients(E1, m):
    """Coefficients ``Gamma_0 .. Gamma_{2m-1}`` with ``E1^(2m) = sum Gamma_k E1^(k)``.

    ``E1`` is a ``2m`` vector jet; the result has ``2m`` fewer orders.
    """
    ders = E1.derivatives(2 * m)
    k = ders[-1].order
    cols = jet_stack([d.truncate(k) for d in ders[:-1]], axis=1)
    gam = linalg.jet_solve(cols, ders[-1][:, None])
    return [gam[j, 0] for j in range(2 * m)]


@dataclass
class GammaReport:
    """Check of ``Gamma_{2i} = (-1)^(m-1+i) lam_{m-i} + (terms in lam_1..lam_i)``.

    Attributes
    ----------
    gamma : list of Jet
    residual : list
        Max coefficient of ``Gamma_{2i} - (-1)^(m-1+i) lam_{m-i}`` per ``i``.
    applicable : list of bool
        Whether ``lam_1..lam_i`` vanish, so the residual must vanish.
    ok : bool
    """

    gamma: list
    residual: list
    applicable: list
    ok: bool


def _jet_abs(j):
    return max((float(abs(v)) for v in j.coeffs.reshape(-1)), default=0.0)


def gamma_structure_check(frame, lam, tol=1e-9):
    """Express ``E_1^(2m)`` in the derivatives of ``E_1`` and test the pattern.

    Parameters
    ----------
    frame : FrameCurve or DarbouxFrame
        A canonical frame jet.
    lam : list of Jet
        Its curvatures ``lam_1 .. lam_m``.

    Notes
    -----
    With the structural equations used here the leading coefficient is
    ``(-1)^(m-1+i) lam_{m-i}``: for ``m = 2`` one finds
    ``E_1'''' = -lam_2 E_1 + lam_1' E_2 + lam_1 E_1''``.
    """
    fr = getattr(frame, "frame", frame)
    m = fr.E.shape[1]
    gam = gamma_coefficients(fr.E[:, 0], m)
    residual, applicable = [], []
    for i in range(m):
        sign = -1 if (m - 1 + i) % 2 else 1
        k = min(gam[2 * i].order, lam[m - i - 1].order)
        r = gam[2 * i].truncate(k) - lam[m - i - 1].truncate(k) * sign
        residual.append(_jet_abs(r))
        applicable.append(all(_jet_abs(lam[j]) <= tol for j in range(i)))
    ok = all(r <= tol for r, a in zip(residual, applicable) if a)
    return GammaReport(gam, residual, applicable, ok)
