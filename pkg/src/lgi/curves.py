"""Curves of Lagrangian subspaces and the geometry attached to them.

Three local representations are used, all as jets at a base point:

* :class:`GraphCurve` holds a symmetric matrix jet ``S`` and stands for
  ``t -> {(x, S(t) x)}``, possibly in a rotated coordinate chart.
* :class:`GeneratorCurve` holds a vector jet ``eps`` whose first ``m``
  derivatives ``eps, eps', ..., eps^(m-1)`` span the subspace.
* :class:`FrameCurve` holds a moving Darboux frame; the subspace is the
  span of its ``E`` block.

Charts
------
Not every Lagrangian subspace is a graph over the ``x`` coordinates.  A
chart is a tuple of indices ``i`` on which the symplectic rotation
``(x_i, y_i) -> (y_i, -x_i)`` is applied before reading off the graph.
Every Lagrangian subspace is a graph in at least one such chart, and
:func:`graph_from_basis` picks the first usable one in a fixed order
(fewest rotated indices first, then lexicographic).
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import linalg
from .errors import NotAmpleError, RankError, SpecError, StructureError
from .expr import parse
from .rings import FLOAT, get_ring
from .series import Jet, jet_concat, jet_stack
from .symplectic import DarbouxFrame, sigma, skew_complement

__all__ = [
    "AmplenessReport",
    "ExprGeneratorCurve",
    "ExprGraphCurve",
    "FlagData",
    "FrameCurve",
    "GeneratorCurve",
    "GraphCurve",
    "JetGraphSource",
    "ampleness",
    "chart_matrix",
    "contraction",
    "extension",
    "flag",
    "generator_from_graph",
    "graph_from_basis",
    "graph_from_frame",
    "rank_at",
    "rank_one_extension",
    "symplectify",
    "to_graph",
    "velocity_form",
    "weight",
]

#: Largest condition number of the ``x`` block accepted when picking a chart.
CHART_COND_LIMIT = 1e6


def chart_matrix(m, chart, ring=FLOAT):
    """Orthogonal symplectic matrix taking standard to chart coordinates."""
    ring = get_ring(ring)
    out = ring.eye(2 * m)
    for i in chart:
        out[i, i] = ring.zero
        out[m + i, m + i] = ring.zero
        out[i, m + i] = ring.one
        out[m + i, i] = -ring.one
    return out


def _symmetry_residual(s):
    d = s - s.T
    return d.max_abs()


class GraphCurve:
    """The curve ``t -> {(x, S(t) x)}`` given by a symmetric matrix jet.

    Parameters
    ----------
    S : Jet
        ``m x m`` matrix jet, symmetric.
    chart : tuple of int
        Indices rotated by ``(x_i, y_i) -> (y_i, -x_i)``; empty for the
        standard coordinates.
    tol : float, optional
        Symmetry tolerance on float jets, relative to the largest entry.
    """

    def __init__(self, S, chart=(), tol=None):
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise SpecError(f"graph matrix must be square, got shape {S.shape}")
        res = _symmetry_residual(S)
        if S.ring.exact:
            if res != 0:
                raise SpecError("graph matrix is not symmetric")
        else:
            tol = S.ring.tol if tol is None else tol
            if res > tol * max(S.max_abs(), 1.0):
                raise SpecError(f"graph matrix is not symmetric (residual {res:.3e})")
        self.S = S
        self.chart = tuple(chart)

    @property
    def m(self):
        return self.S.shape[0]

    @property
    def ring(self):
        return self.S.ring

    @property
    def base(self):
        return self.S.base

    @property
    def order(self):
        return self.S.order

    def __repr__(self):
        return f"GraphCurve(m={self.m}, order={self.order}, base={self.base}, chart={self.chart})"

    def basis(self):
        """Jet of the ``2m x m`` basis ``[I; S]`` in standard coordinates."""
        ring = self.ring
        top = Jet.constant(ring.eye(self.m), self.order, ring, self.base)
        pi = jet_concat([top, self.S], axis=0)
        if self.chart:
            pi = chart_matrix(self.m, self.chart, ring).T @ pi
        return pi

    def shift(self, h):
        """The same curve re-expanded at ``base + h``."""
        return GraphCurve(self.S.shift(h), self.chart)

    def truncate(self, order):
        return GraphCurve(self.S.truncate(order), self.chart)


@dataclass
class GeneratorCurve:
    """Vector jet ``eps`` whose derivatives up to order ``m - 1`` span the curve."""

    eps: Jet
    m: int

    def __post_init__(self):
        if self.eps.shape != (2 * self.m,):
            raise SpecError(f"generator must have {2 * self.m} components, got shape {self.eps.shape}")

    @property
    def ring(self):
        return self.eps.ring

    @property
    def base(self):
        return self.eps.base

    @property
    def order(self):
        return self.eps.order

    def basis(self):
        """Jet of the ``2m x m`` basis ``(eps, ..., eps^(m-1))``."""
        return jet_stack(self.eps.derivatives(self.m - 1), axis=1)


@dataclass
class FrameCurve:
    """A moving frame; ``sign`` is the coefficient of ``F_m`` in ``E_m'``."""

    frame: DarbouxFrame
    sign: int = 1

    @property
    def m(self):
        return self.frame.m

    @property
    def ring(self):
        return self.frame.E.ring

    @property
    def base(self):
        return self.frame.E.base

    @property
    def order(self):
        return self.frame.E.order

    def basis(self):
        return self.frame.E

    def __neg__(self):
        return FrameCurve(-self.frame, self.sign)


@dataclass
class FlagData:
    """Contractions and extensions of a curve at one point.

    ``contractions[i]`` is a basis of the ``i``-th contraction for
    ``i = 0..m`` (index 0 is the curve itself) and ``extensions[i]`` of the
    ``i``-th extension.
    """

    contractions: list
    extensions: list
    dims: tuple = field(default=())

    def chain(self):
        """Bases from the deepest contraction to the largest extension."""
        inner = [b for b in reversed(self.contractions[1:]) if b.shape[1]]
        return inner + [self.contractions[0]] + self.extensions[1:]


@dataclass
class AmplenessReport:
    """Ampleness certified up to a jet order, never as a bare boolean."""

    ample: bool
    weight: object
    order: int

    def __str__(self):
        if self.ample:
            return f"ample with weight {self.weight}"
        return f"not ample to order {self.order}"


# -- conversions -----------------------------------------------------------
def _chart_candidates(m):
    for size in range(m + 1):
        yield from combinations(range(m), size)


def _cond(mat):
    sv = np.linalg.svd(np.asarray(mat, dtype=np.float64), compute_uv=False)
    if sv[-1] == 0:
        return np.inf
    return sv[0] / sv[-1]


def graph_from_basis(basis, tol=None):
    """Graph form ``S = Pi_2 Pi_1^{-1}`` of the span of a ``2m x m`` basis jet.

    Chooses a chart as described in the module notes.  Raises
    :class:`RankError` if no chart works (the span is not Lagrangian or
    not of full rank).
    """
    n, m = basis.shape
    if n != 2 * m:
        raise SpecError(f"basis must be {2 * m} x {m}, got {basis.shape}")
    ring = basis.ring
    best = None
    for chart in _chart_candidates(m):
        b = chart_matrix(m, chart, ring) @ basis if chart else basis
        top = b.value[:m]
        if ring.exact:
            if linalg.det(top) != 0:
                best = (chart, b)
                break
            continue
        c = _cond(top)
        if c <= CHART_COND_LIMIT:
            best = (chart, b)
            break
        if np.isfinite(c) and (best is None or c < best[2]):
            best = (chart, b, c)
    if best is None:
        raise RankError("no coordinate chart makes this subspace a graph; rotate coordinates")
    chart, b = best[0], best[1]
    pi1 = b[:m]
    pi2 = b[m:]
    s = pi2 @ linalg.jet_inv(pi1)
    if not ring.exact:
        s = (s + s.T) * 0.5
    return GraphCurve(s, chart, tol=1e-6)


def graph_from_frame(f, tol=None):
    """Graph form of a frame curve (the span of its ``E`` block)."""
    if isinstance(f, FrameCurve):
        f = f.frame
    return graph_from_basis(f.E, tol)


def to_graph(c):
    """Graph form of any local curve representation."""
    if isinstance(c, GraphCurve):
        return c
    return graph_from_basis(c.basis())


def rank_one_extension(c, order):
    """Exact rank 1 polynomial curve agreeing with ``c`` to its jet order.

    A rank 1 graph curve has ``S' = q psi psi^T`` with ``psi_r = 1`` for a
    pivot index ``r``.  Zero-padding ``q`` and ``psi`` and integrating
    gives a curve that is rank 1 at every order, unlike a zero-padded
    ``S``, so invariants computed from it agree with those of ``c`` on all
    the orders that ``c`` determines.

    Parameters
    ----------
    c : GraphCurve
        Rank 1 at its base point.
    order : int
        Order of the returned jet.
    """
    s = c.S
    if order <= s.order:
        return c
    d = s.derive()
    diag = [abs(d.value[i, i]) for i in range(c.m)]
    r = int(np.argmax(diag))
    if c.ring.is_zero(d.value[r, r], max(float(np.max(np.abs(d.value))), 1e-300) if not c.ring.exact else 1):
        raise RankError("velocity vanishes at the base point; no rank 1 factorization")
    q = d[r, r]
    psi = d[:, r] / q
    q = q.pad(order - 1)
    psi = psi.pad(order - 1)
    ds = (psi[:, None] * psi[None, :]) * q
    ext = ds.integrate() + s.value
    return GraphCurve(ext, c.chart)


def symplectify(a):
    """Lagrangian product curve of an ``n``-dimensional subspace curve in ``R^{2n}``.

    The input curve is ``t -> {(x, A(t) x)}`` in ``V = R^{2n}``.  The
    output lives in ``V x V*`` with the form
    ``((v1, h1), (v2, h2)) -> h2(v1) - h1(v2)`` and is the family of
    products of the subspace with its annihilator.  Placing ``V`` in the
    ``x`` slots and ``-V*`` in the ``y`` slots matches the coordinate form;
    in the chart rotating indices ``n..2n-1`` the product is the graph of
    ``-[[0, A^T], [A, 0]]``.

    Parameters
    ----------
    a : Jet
        ``n x n`` matrix jet.

    Returns
    -------
    GraphCurve
        Half-dimension ``2n``.
    """
    n = a.shape[0]
    if a.shape != (n, n):
        raise SpecError(f"expected a square matrix jet, got shape {a.shape}")
    zero = Jet.zeros((n, n), a.order, a.ring, a.base)
    top = jet_concat([zero, a.T], axis=1)
    bottom = jet_concat([a, zero], axis=1)
    s = -jet_concat([top, bottom], axis=0)
    return GraphCurve(s, tuple(range(n, 2 * n)))


# -- local geometry ------------------------------------------------------
def _at(c, t):
    """Shift ``c`` so that its base is ``t`` (no-op when ``t`` is None)."""
    if t is None or t == c.base:
        return c
    h = t - c.base
    if isinstance(c, GraphCurve):
        return c.shift(h)
    if isinstance(c, GeneratorCurve):
        return GeneratorCurve(c.eps.shift(h), c.m)
    fr = c.frame
    return FrameCurve(DarbouxFrame(fr.E.shift(h), fr.F.shift(h), fr.sign), c.sign)


def velocity_form(c, t=None):
    """Matrix of the velocity quadratic form on the graph coordinates ``x``.

    For a graph curve the section ``l(t) = (x, S(t) x)`` gives
    ``sigma(l', l) = x^T S'(t) x``, so the form is ``S'(t)``.
    """
    g = to_graph(c)
    h = 0 if t is None else t - g.base
    return g.S.derive().evaluate(h)


def rank_at(c, t=None, tol=None):
    """Rank of the velocity form."""
    v = velocity_form(c, t)
    if not linalg.ring_of(v).exact:
        scale = max(float(np.max(np.abs(v))), 1e-300)
        if scale < 1e-12:
            return 0
    return linalg.rank(v, tol)


def _det_increment(g):
    s = g.S
    return linalg.jet_det(s - s.value)


def ampleness(c, t=None, tol=None):
    """Ampleness at ``t`` certified to the available jet order."""
    g = _at(to_graph(c), t)
    d = _det_increment(g)
    k = d.valuation(tol)
    return AmplenessReport(k is not None, k, d.order)


def weight(c, t=None, tol=None):
    """Vanishing order at ``t`` of ``tau -> det(S(tau) - S(t))``.

    Raises
    ------
    NotAmpleError
        If every retained coefficient vanishes.
    """
    rep = ampleness(c, t, tol)
    if not rep.ample:
        raise NotAmpleError(f"curve is not ample to order {rep.order}")
    return rep.weight


def _independent_columns(mat, tol=None):
    """Columns of ``mat`` forming a basis of its column space.

    Float columns are normalized first so that derivative columns of very
    different size are compared fairly.
    """
    mat = np.asarray(mat)
    if linalg.ring_of(mat).exact:
        return linalg.column_basis(mat)
    norms = np.linalg.norm(mat, axis=0)
    top = norms.max() if norms.size else 0.0
    keep = norms > 1e-12 * max(top, 1e-300)
    unit = mat[:, keep] / norms[keep]
    if unit.shape[1] == 0:
        return unit
    return linalg.column_basis(unit, tol)


def _derivative_columns(c, count):
    """Values at the base of the spanning sections and their derivatives."""
    if isinstance(c, GeneratorCurve):
        need = c.m - 1 + count
        if c.eps.order < need:
            raise NotAmpleError(f"jet order {c.eps.order} too small for {need} derivatives")
        ders = c.eps.derivatives(need)
        return np.stack([d.value for d in ders], axis=1)
    basis = c.basis()
    if basis.order < count:
        raise NotAmpleError(f"jet order {basis.order} too small for {count} derivatives")
    ders = basis.derivatives(count)
    return np.concatenate([d.value for d in ders], axis=1)


def extension(c, i, t=None, tol=None):
    """Basis (columns) of the ``i``-th extension at ``t``.

    Spanned by the values of sections of the curve and their derivatives
    up to order ``i``.
    """
    if i < 0:
        raise ValueError("extension index must be nonnegative")
    c = _at(c, t)
    return _independent_columns(_derivative_columns(c, i), tol)


def _contraction_by_sections(c, i, tol=None):
    """Direct computation of the ``i``-th contraction from its definition.

    Carries a smooth basis ``B(t)`` of the previous contraction.  A section
    ``B c(t)`` has derivative ``B' c + B c'``, which lies in ``span B`` at
    the point iff ``B' c`` does; the admissible ``c`` form the kernel of
    ``[B', -B]``, computed as a jet with a frozen pivot pattern.
    """
    b = c.basis()
    for _ in range(i):
        if b.shape[1] == 0:
            break
        if b.order < 1:
            raise NotAmpleError("jet order exhausted while contracting")
        db = b.derive()
        bb = b.truncate(db.order)
        system = jet_concat([db, -bb], axis=1)
        ker = linalg.jet_nullspace(system, tol)
        d = bb.shape[1]
        coeff = ker[:d]
        b = bb @ coeff
    return b


def contraction(c, i, t=None, route="dual", tol=None):
    """Basis (columns) of the ``i``-th contraction at ``t``.

    Parameters
    ----------
    route : {"dual", "sections"}
        ``"dual"`` takes the skew complement of the ``i``-th extension;
        ``"sections"`` follows the defining recursion on jets and serves
        as an independent cross-check.
    """
    if i < 0:
        raise ValueError("contraction index must be nonnegative")
    c = _at(c, t)
    if route == "dual":
        ext = extension(c, i, tol=tol)
        if ext.shape[1] == ext.shape[0]:
            return linalg.ring_of(ext).zeros((ext.shape[0], 0))
        return skew_complement(ext, tol)
    if route == "sections":
        b = _contraction_by_sections(c, i, tol)
        return _independent_columns(b.value, tol) if b.shape[1] else b.value
    raise ValueError(f"unknown route {route!r}")


def flag(c, t=None, tol=None):
    """Complete flag of contractions and extensions at ``t``.

    Raises
    ------
    StructureError
        If the dimensions do not step by one (the curve is not of rank 1
        and constant weight here).
    """
    c = _at(c, t)
    m = c.m
    ext = [extension(c, i, tol=tol) for i in range(m + 1)]
    con = [ext[0]]
    for i in range(1, m + 1):
        e = ext[i]
        if e.shape[1] == 2 * m:
            con.append(linalg.ring_of(e).zeros((2 * m, 0)))
        else:
            con.append(skew_complement(e, tol))
    for i in range(m + 1):
        if ext[i].shape[1] != m + i or con[i].shape[1] != m - i:
            raise StructureError(
                f"flag dimensions break at step {i}: extension {ext[i].shape[1]} (expected {m + i}), "
                f"contraction {con[i].shape[1]} (expected {m - i}); not constant weight here"
            )
    dims = tuple(range(1, 2 * m))
    return FlagData(con, ext, dims)


def generator_from_graph(c, tol=None):
    """Smooth vector jet spanning the deepest contraction.

    The deepest contraction consists of ``(a, S a)`` with ``a`` in the
    common kernel of ``S', ..., S^(m-1)``.  The kernel is taken on jets
    with a pivot pattern frozen at the base point and the free component
    set to 1, so the result is not normalized.

    Raises
    ------
    StructureError
        If a kernel in the chain has the wrong dimension (for instance a
        curve of full rank fails at the first step).
    """
    g = to_graph(c)
    m = g.m
    ring = g.ring
    s = g.S
    if m == 1:
        a = Jet.constant(ring.asarray([1]), s.order, ring, s.base)
    else:
        ders = s.derivatives(m - 1)[1:]
        for i in range(1, m):
            stacked = np.concatenate([d.value for d in ders[:i]], axis=0)
            k = stacked.shape[1] - linalg.rank(_row_normalized(stacked), tol)
            if k != m - i:
                raise StructureError(
                    f"kernel of the first {i} derivatives has dimension {k}, expected {m - i}"
                )
        stacked = jet_concat(ders, axis=0)
        a = linalg.jet_nullspace(stacked, tol)[:, 0]
    sa = s.truncate(a.order) @ a
    eps = jet_concat([a, sa], axis=0)
    if g.chart:
        eps = chart_matrix(m, g.chart, ring).T @ eps
    return GeneratorCurve(eps, m)


def _row_normalized(mat):
    if linalg.ring_of(mat).exact:
        return mat
    norms = np.linalg.norm(mat, axis=1)
    top = norms.max() if norms.size else 0.0
    keep = norms > 1e-12 * max(top, 1e-300)
    return mat[keep] / norms[keep, None]


# -- curve sources ---------------------------------------------------------
class ExprGraphCurve:
    """Graph curve given by expression strings for the entries of ``S``.

    ``entries`` is an ``m x m`` nested list; entries below the diagonal may
    be ``None`` and are then copied from above.
    """

    def __init__(self, entries):
        m = len(entries)
        exprs = [[None] * m for _ in range(m)]
        for i in range(m):
            if len(entries[i]) != m:
                raise SpecError("graph entries must form a square matrix")
            for j in range(m):
                src = entries[i][j]
                if src is None:
                    src = entries[j][i]
                if src is None:
                    raise SpecError(f"missing entry ({i}, {j})")
                exprs[i][j] = parse(str(src))
        self.m = m
        self.entries = [[e.text for e in row] for row in exprs]
        self._exprs = exprs

    def at(self, tau, order, ring=FLOAT):
        ring = get_ring(ring)
        rows = [jet_stack([e.jet(tau, order, ring) for e in row]) for row in self._exprs]
        return GraphCurve(jet_stack(rows))


class ExprGeneratorCurve:
    """Generator curve given by ``2m`` expression strings."""

    def __init__(self, components):
        if len(components) % 2:
            raise SpecError("a generator needs an even number of components")
        self.m = len(components) // 2
        self._exprs = [parse(str(c)) for c in components]

    def at(self, tau, order, ring=FLOAT):
        ring = get_ring(ring)
        return GeneratorCurve(jet_stack([e.jet(tau, order, ring) for e in self._exprs]), self.m)


class JetGraphSource:
    """Wrap a fixed graph jet; other base points are reached by re-expansion."""

    def __init__(self, graph):
        self.graph = graph
        self.m = graph.m

    def at(self, tau, order=None, ring=None):
        g = self.graph
        if ring is not None and get_ring(ring) is not g.ring:
            if get_ring(ring).exact:
                raise TypeError("cannot move a float jet to the rational ring")
            g = GraphCurve(g.S.to_float(), g.chart)
        g = _at(g, tau)
        if order is not None and order < g.order:
            g = g.truncate(order)
        return g


def pairing_matrix(basis):
    """All pairings of a set of vectors; zero iff their span is isotropic."""
    return sigma(basis, basis)
