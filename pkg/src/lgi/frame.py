"""Canonical moving frame of a rank 1 curve and its modified curvatures.

Pipeline
--------
1. A generator ``eps`` spans the deepest contraction of the curve.
2. It is rescaled so that ``sigma(eps^(m), eps^(m-1)) = sign``, where
   ``sign = +1`` for increasing and ``-1`` for decreasing curves.
3. ``E_i = eps^(i-1)`` and ``F_m = sign * eps^(m)``.
4. The remaining ``F_1..F_{m-1}`` are completed to some Darboux frame
   ``Fbar``; the choice does not matter.
5. The ``E``-coefficients ``xi`` of ``Fbar_i'`` form a symmetric matrix.
6. A symmetric correction ``B`` with zero last row and column makes
   ``F_i = Fbar_i + sum_j b_ij E_j`` satisfy the structural equations

   ``E_i' = E_{i+1}``, ``E_m' = sign F_m``, ``F_1' = lam_m E_1`` and
   ``F_i' = lam_{m-i+1} E_i - F_{i-1}``,

   and the diagonal of the corrected ``xi`` gives the ``lam_i``.

Order bookkeeping
-----------------
Each step above truncates to the orders its inputs support, and chained
together they lose ``4m - 1`` orders.  The true dependence is shorter.
:func:`canonical_frame` therefore replaces the input by an exact rank 1
polynomial curve with the same jet (see
:func:`lgi.curves.rank_one_extension`) and runs the pipeline ``2m``
orders deeper.  Coefficients that the input jet does not determine are
then cut off: for a graph jet of order ``K`` the curvatures are returned
to order ``K - max(3m, 2m + 2)``.

The cut is measured, not guessed.  Two rank 1 curves with the same graph
jet of order ``K`` can differ in ``lam_i`` at coefficient ``K - 2i - m + 1``
(for instance ``m = 3``, ``K = 17``: ``lam_3`` differs at coefficient 9),
so ``lam_m`` is only determined to order ``K - 3m``.  For ``m <= 2`` this
equals ``K - 2m - 2`` or exceeds it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .curves import FrameCurve, GeneratorCurve, generator_from_graph, rank_one_extension, to_graph
from .errors import DomainError, NotAmpleError, StructureError
from .series import Jet, _make, jet_concat, jet_stack
from .symplectic import DarbouxFrame, _apply_j, is_darboux, sigma

__all__ = [
    "CanonicalResult",
    "canonical_frame",
    "darboux_completion",
    "initial_frame",
    "modified_curvatures",
    "normalize_generator",
    "valid_order",
    "solve_B",
    "structure_matrix",
    "structural_residual",
    "xi_from_frame",
]


def _first_nonzero_sign(eps):
    """Sign of the first nonzero coefficient of the first nonzero component."""
    c = eps.coeffs
    scale = eps.magnitude_scale()
    for comp in range(c.shape[1]):
        for k in range(c.shape[0]):
            v = c[k, comp]
            if not eps.ring.is_zero(v, scale):
                return 1 if v > 0 else -1
    raise StructureError("generator vanishes identically")


def pairing_jet(eps, m):
    """``sigma(eps^(m), eps^(m-1))`` as a scalar jet."""
    ders = eps.derivatives(m)
    return sigma(ders[m], ders[m - 1])


def normalize_generator(g, sign_hint=None):
    """Rescale a generator so that its top pairing is ``+1`` or ``-1``.

    Parameters
    ----------
    g : GeneratorCurve
    sign_hint : {None, 1, -1}
        Required sign of the leading coefficient of the first nonzero
        component of the result.  ``None`` means ``+1``.

    Returns
    -------
    (GeneratorCurve, int)
        The rescaled generator (order reduced by ``m``) and the sign of
        the pairing, which is ``+1`` for increasing curves.

    Raises
    ------
    NotAmpleError
        If the pairing has a vanishing constant term.
    DomainError
        On the rational ring when ``|pairing|`` does not have a rational
        square root at the base point.
    """
    m = g.m
    eps = g.eps
    if eps.order < m:
        raise NotAmpleError(f"generator jet of order {eps.order} cannot be differentiated {m} times")
    ders = eps.derivatives(m)
    p = sigma(ders[m], ders[m - 1])
    p0 = p.value
    # compare with the sizes of the two vectors at the base point; high
    # jet coefficients can be far larger and say nothing about p0
    scale = 1
    if not eps.ring.exact:
        scale = max(float(np.max(np.abs(ders[m].value))) * float(np.max(np.abs(ders[m - 1].value))), 1e-300)
    if eps.ring.is_zero(p0, scale):
        raise NotAmpleError("top pairing of the generator vanishes; not monotone or not ample here")
    sign = 1 if p0 > 0 else -1
    try:
        alpha = (p * sign).sqrt().reciprocal()
    except DomainError as exc:
        raise DomainError(f"cannot normalize exactly: {exc}") from exc
    scaled = eps.truncate(alpha.order) * alpha
    want = 1 if sign_hint is None else int(sign_hint)
    if want not in (1, -1):
        raise ValueError("sign_hint must be +1, -1 or None")
    if _first_nonzero_sign(scaled) != want:
        scaled = -scaled
    return GeneratorCurve(scaled, m), sign


def initial_frame(g, sign=1):
    """``E_i = eps^(i-1)`` and ``F_m = sign * eps^(m)`` from a normalized generator.

    Returns
    -------
    (Jet, Jet)
        The ``2m x m`` block ``E`` and the vector ``F_m``, truncated to a
        common order.
    """
    m = g.m
    if g.eps.order < m:
        raise NotAmpleError("generator jet too short for the initial frame")
    ders = g.eps.derivatives(m)
    k = ders[m].order
    e = jet_stack([d.truncate(k) for d in ders[:m]], axis=1)
    return e, ders[m] * sign


def darboux_completion(E, Fm, perturbation=None):
    """Complete ``E_1..E_m, F_m`` to a Darboux frame.

    Each ``G_i`` (``i < m``) is the pointwise minimum norm solution of
    ``sigma(G_i, E_j) = delta_ij`` and ``sigma(G_i, F_m) = 0``; then
    ``Fbar_i = G_i + 1/2 sum_{k<m} sigma(G_i, G_k) E_k`` removes the
    pairings among the ``Fbar``.

    Parameters
    ----------
    perturbation : array_like, optional
        ``(m-1) x (m-1)`` matrix ``P``; adds ``sum_k P[k, i] E_k`` to
        ``G_i`` before the correction.  This gives another valid
        completion and is used to check that the curvatures do not depend
        on the choice.

    Returns
    -------
    Jet
        ``2m x (m-1)`` block of ``Fbar_1..Fbar_{m-1}``.
    """
    m = E.shape[1]
    ring = E.ring
    if m == 1:
        return Jet.zeros((2, 0), E.order, ring, E.base)
    k = min(E.order, Fm.order)
    E = E.truncate(k)
    Fm = Fm.truncate(k)
    cols = jet_concat([E, Fm[:, None]], axis=1)  # 2m x (m+1)
    a = _apply_j(cols).T  # rows: sigma(., E_j) and sigma(., F_m)
    gram = a @ a.T
    rhs = ring.zeros((m + 1, m - 1))
    for i in range(m - 1):
        rhs[i, i] = ring.one
    g = a.T @ (linalg.jet_inv(gram) @ rhs)  # 2m x (m-1)
    e_low = E[:, : m - 1]
    if perturbation is not None:
        p = ring.asarray(perturbation)
        g = g + e_low @ p
    pair = sigma(g, g)  # (m-1) x (m-1)
    return g + (e_low @ pair.T) * ring.coerce("1/2")


def _coefficient_tol(ring, scale, tol):
    if ring.exact:
        return 0
    return (ring.tol if tol is None else tol) * max(scale, 1.0)


def xi_from_frame(E, F, sign=1, tol=None):
    """Symmetric matrix of ``E``-coefficients of the derivatives of ``F``.

    For ``v = F_i'`` the ``E_j`` coefficient is ``-sigma(v, F_j)`` and the
    ``F_j`` coefficient is ``sigma(v, E_j)``.  The latter must equal
    ``-1`` at ``j = i - 1`` and vanish otherwise; this and the symmetry of
    the result are checked.

    Parameters
    ----------
    E, F : Jet
        ``2m x m`` blocks of a Darboux frame whose ``E`` part satisfies
        ``E_i' = E_{i+1}`` and ``E_m' = sign F_m``.

    Raises
    ------
    StructureError
        Reporting the offending entry.
    """
    m = E.shape[1]
    ring = E.ring
    dF = F.derive()
    k = dF.order
    E = E.truncate(k)
    F = F.truncate(k)
    xi = -sigma(dF, F)  # xi[i, j] = -sigma(F_i', F_j)
    fpart = sigma(dF, E)  # fpart[i, j] = sigma(F_i', E_j)
    expected = ring.zeros((m, m))
    for i in range(1, m):
        expected[i, i - 1] = -ring.one
    scale = max(E.max_abs(), F.max_abs())
    thr = _coefficient_tol(ring, scale * scale, tol)
    diff = fpart - expected
    _check_small(diff, thr, "F-coefficient of F_{i}' at F_{j}")
    asym = xi - xi.T
    _check_small(asym, thr, "asymmetry of xi at ({i}, {j})")
    if not ring.exact:
        xi = (xi + xi.T) * 0.5
    return xi


def _check_small(jet, thr, what):
    c = jet.coeffs
    for idx in np.ndindex(c.shape):
        v = c[idx]
        if abs(v) > thr:
            _, i, j = idx
            raise StructureError(
                f"{what.format(i=i + 1, j=j + 1)} is {float(v):.3e} at order {idx[0]} (tolerance {float(thr):.1e})"
            )


def solve_B(xi):
    """Symmetric correction with zero last row and column.

    Rows are filled from ``m - 1`` down to ``1`` (1-based) by
    ``b[i-1, j] = -xi[i, j] - b[i, j]' - b[i, j-1]``.

    Parameters
    ----------
    xi : Jet
        Symmetric ``m x m`` matrix jet; each row consumes one order.

    Returns
    -------
    list of list of Jet
        ``b[i][j]`` (0-based) as scalar jets of varying order.
    """
    m = xi.shape[0]
    if m > 1 and xi.order < m - 1:
        raise NotAmpleError(f"xi jet of order {xi.order} too short for the correction (needs {m - 1})")
    zero = Jet.zeros((), xi.order, xi.ring, xi.base)
    b = [[zero for _ in range(m)] for _ in range(m)]
    # 1-based i from m down to 2; j from 1 to i - 1
    for i in range(m, 1, -1):
        for j in range(1, i):
            val = -xi[i - 1, j - 1]
            bij = b[i - 1][j - 1]
            if bij is not zero:
                val = val - bij.derive()
            if j >= 2:
                val = val - b[i - 1][j - 2]
            b[i - 2][j - 1] = val
            b[j - 1][i - 2] = val
    return b


def correction_matrix(b):
    """Stack the entries returned by :func:`solve_B` into one matrix jet."""
    m = len(b)
    k = min(x.order for row in b for x in row)
    return jet_stack([jet_stack([x.truncate(k) for x in row]) for row in b])


def modified_curvatures(xi, b):
    """``lam_1..lam_m`` from the diagonal of the corrected ``xi``.

    ``lam_{m-i+1} = xi_ii + b_ii' + 2 b_{i,i-1}`` (1-based, last term only
    for ``i >= 2``).

    Returns
    -------
    list of Jet
        ``[lam_1, ..., lam_m]``.
    """
    m = xi.shape[0]
    lam = [None] * m
    for i in range(1, m + 1):
        val = xi[i - 1, i - 1]
        bii = b[i - 1][i - 1]
        if bii.max_abs() != 0:
            val = val + bii.derive()
        if i >= 2:
            val = val + b[i - 1][i - 2] * 2
        lam[m - i] = val
    k = min(x.order for x in lam)
    return [x.truncate(k) for x in lam]


def structure_matrix(lam, sign=1):
    """Matrix jet ``C`` with ``Phi' = Phi C`` for the frame ``Phi = (E, F)``.

    Parameters
    ----------
    lam : list of Jet
        ``[lam_1, ..., lam_m]`` scalar jets.
    """
    m = len(lam)
    ring = lam[0].ring
    k = min(x.order for x in lam)
    c = ring.zeros((k + 1, 2 * m, 2 * m))
    one = ring.one
    for i in range(1, m):
        c[0, i, i - 1] = one
    c[0, 2 * m - 1, m - 1] = one * sign
    c[:, 0, m] = lam[m - 1].coeffs[: k + 1]
    for i in range(2, m + 1):
        c[:, i - 1, m + i - 1] = lam[m - i].coeffs[: k + 1]
        c[0, m + i - 2, m + i - 1] = -one
    return _make(Jet, c, ring, lam[0].base)


def structural_residual(frame, lam, sign=1):
    """Largest coefficient of ``Phi' - Phi C`` over all retained orders."""
    phi = frame.matrix()
    d = phi.derive()
    c = structure_matrix(lam, sign)
    k = min(d.order, c.order)
    res = d.truncate(k) - phi.truncate(k) @ c.truncate(k)
    return res.max_abs()


@dataclass
class CanonicalResult:
    """Output of :func:`canonical_frame`."""

    frame: FrameCurve
    lam: list
    generator: GeneratorCurve
    xi: Jet
    B: Jet
    residuals: dict = field(default_factory=dict)

    @property
    def sign(self):
        return self.frame.sign


def _extended(c):
    """Rank 1 polynomial extension and the valid output order."""
    g = to_graph(c)
    m = g.m
    k = g.order
    return rank_one_extension(g, k + 2 * m), valid_order(k, m)


def valid_order(k, m):
    """Highest curvature coefficient determined by a graph jet of order ``k``."""
    return k - max(3 * m, 2 * m + 2)


def canonical_frame(c, sign_hint=None, perturbation=None, tol=None, check=True, pad=True):
    """Canonical frame and modified curvatures of a rank 1 curve.

    Parameters
    ----------
    c : GraphCurve, GeneratorCurve or FrameCurve
        Local jet of the curve.
    sign_hint : {None, 1, -1}
        Selects one of the two canonical frames, which differ by a global
        sign; see :func:`normalize_generator`.
    perturbation : array_like, optional
        Passed to :func:`darboux_completion`.
    check : bool
        Verify the Darboux relations and the structural equations of the
        output and record the residuals.
    pad : bool
        Extend the input to an exact rank 1 polynomial curve and truncate
        the output to the valid orders (see the module notes).  With
        ``pad=False`` every intermediate jet keeps only the orders it
        supports, and a generator input is used as given.

    Returns
    -------
    CanonicalResult
        Curvatures of order ``K - max(3m, 2m + 2)`` for a graph input of
        order ``K`` (see :func:`valid_order`) and a frame one order longer.
    """
    out_order = None
    if pad:
        c, out_order = _extended(c)
        if out_order < 0:
            raise NotAmpleError(f"jet order too short for the curvatures of a curve with m = {c.m}")
    if isinstance(c, GeneratorCurve):
        gen = c
    else:
        gen = generator_from_graph(to_graph(c), tol)
    norm, sign = normalize_generator(gen, sign_hint)
    E, Fm = initial_frame(norm, sign)
    m = gen.m
    Fbar_low = darboux_completion(E, Fm, perturbation)
    k = min(E.order, Fm.order, Fbar_low.order)
    E = E.truncate(k)
    Fbar = jet_concat([Fbar_low.truncate(k), Fm.truncate(k)[:, None]], axis=1)
    xi = xi_from_frame(E, Fbar, sign, tol)
    b = solve_B(xi)
    lam = modified_curvatures(xi, b)
    B = correction_matrix(b)
    kf = B.order
    if out_order is not None:
        lam = [x.truncate(out_order) for x in lam]
        kf = out_order + 1
    F = Fbar.truncate(kf) + E.truncate(kf) @ B.T
    frame = DarbouxFrame(E.truncate(kf), F, sign)
    result = CanonicalResult(FrameCurve(frame, sign), lam, norm, xi, B)
    if check:
        rep = is_darboux(frame, tol if tol is not None else 1e-9)
        result.residuals["darboux"] = rep.residual
        result.residuals["structure"] = structural_residual(frame, lam, sign)
    return result
