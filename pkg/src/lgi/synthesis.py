"""Build the curve with prescribed modified curvatures.

The frame ``Phi = (E, F)`` solves the linear system ``Phi' = Phi C(t)``
where ``C`` is :func:`lgi.frame.structure_matrix` of the prescribed
curvatures.  Locally the Taylor coefficients follow from
``Phi_{n+1} = 1/(n+1) sum_p Phi_{n-p} C_p``; over an interval the same
recursion is re-expanded at each grid point.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .curves import FrameCurve, GraphCurve, chart_matrix, graph_from_basis, graph_from_frame
from .errors import SpecError, StructureError, ToleranceError
from .expr import Expr, parse
from .frame import canonical_frame, structure_matrix
from .rings import FLOAT, get_ring
from .series import Jet, _make
from .symplectic import DarbouxFrame, darboux_defect, is_darboux

__all__ = [
    "CurvatureSpec",
    "LambdaCurve",
    "RoundtripReport",
    "SynthesisResult",
    "parse_curvature",
    "random_polynomial_spec",
    "roundtrip",
    "synthesize_interval",
    "synthesize_local",
]

#: Darboux residual above which interval propagation aborts.
ABORT_RESIDUAL = 1e-6


def parse_curvature(expr):
    """Parse a curvature given as an expression or a coefficient list.

    A list ``[c0, c1, ...]`` stands for the polynomial ``c0 + c1 t + ...``;
    entries may be numbers or strings such as ``"3/2"``.
    """
    if isinstance(expr, Expr):
        return expr
    if isinstance(expr, (list, tuple)):
        terms = []
        for k, c in enumerate(expr):
            if isinstance(c, float):
                c = Fraction(c).limit_denominator(10**12) if c != int(c) else int(c)
            if c == 0:
                continue
            terms.append(f"({c})" if k == 0 else f"({c})*t" if k == 1 else f"({c})*t^{k}")
        return parse(" + ".join(terms) if terms else "0")
    if isinstance(expr, (int, Fraction)):
        return parse(str(expr))
    return parse(expr)


def random_polynomial_spec(m, rng, degree=3, max_den=6):
    """Random :class:`CurvatureSpec` with polynomial curvatures.

    Each ``rho_i`` has a degree drawn from ``0..degree`` and coefficients
    ``p/q`` in ``[-1, 1]`` with ``1 <= q <= max_den``.

    Parameters
    ----------
    rng : numpy.random.Generator
    """
    rho = []
    for _ in range(m):
        deg = int(rng.integers(0, degree + 1))
        coeffs = []
        for _ in range(deg + 1):
            q = int(rng.integers(1, max_den + 1))
            coeffs.append(Fraction(int(rng.integers(-q, q + 1)), q))
        rho.append(coeffs)
    return CurvatureSpec(rho)


@dataclass
class CurvatureSpec:
    """Prescribed curvatures ``rho_1..rho_m`` and the sign of ``E_m'``.

    ``rho[i]`` is the function that ``lam_{i+1}`` must equal.
    """

    rho: list
    sign: int = 1

    def __post_init__(self):
        if not self.rho:
            raise SpecError("need at least one curvature")
        if self.sign not in (1, -1):
            raise SpecError("sign must be +1 or -1")
        self.rho = [parse_curvature(r) for r in self.rho]

    @property
    def m(self):
        return len(self.rho)

    def jets(self, t0, order, ring=FLOAT):
        return [r.jet(t0, order, ring) for r in self.rho]

    def texts(self):
        return [r.text for r in self.rho]


def _coerce_initial(initial, m, ring):
    if initial is None:
        return ring.eye(2 * m)
    if isinstance(initial, DarbouxFrame):
        initial = initial.matrix()
    x0 = ring.asarray(initial)
    if x0.shape != (2 * m, 2 * m):
        raise SpecError(f"initial frame must be {2 * m} x {2 * m}")
    rep = is_darboux(DarbouxFrame(x0[:, :m], x0[:, m:]), 1e-9)
    if not rep:
        raise SpecError(f"initial frame is not Darboux (residual {rep.residual:.3e})")
    return x0


def synthesize_local(spec, t0=0, order=None, ring=FLOAT, initial=None):
    """Jet of the frame with the prescribed curvatures at ``t0``.

    Parameters
    ----------
    spec : CurvatureSpec
    t0 : scalar
        Base point; rational strings are accepted on the rational ring.
    order : int, optional
        Jet order, default ``m^2 + 2m + 2``.
    initial : array_like or DarbouxFrame, optional
        Frame at ``t0``, default the standard basis.

    Returns
    -------
    FrameCurve
    """
    ring = get_ring(ring)
    m = spec.m
    order = m * m + 2 * m + 2 if order is None else order
    x0 = _coerce_initial(initial, m, ring)
    t0 = ring.coerce(t0)
    lam = spec.jets(t0, max(order - 1, 0), ring)
    c = structure_matrix(lam, spec.sign)
    coeffs = kernels.taylor_linear(x0, c.coeffs, order)
    phi = _make(Jet, coeffs, ring, t0)
    return FrameCurve(DarbouxFrame(phi[:, :m], phi[:, m:], spec.sign), spec.sign)


@dataclass
class SynthesisResult:
    """Frame samples over a grid plus the local jet at the start point."""

    t: np.ndarray
    frames: np.ndarray
    S: list
    charts: list
    local: FrameCurve
    darboux_residual: float
    metadata: dict = field(default_factory=dict)

    def frame_at(self, i):
        m = self.frames.shape[1] // 2
        return DarbouxFrame(self.frames[i][:, :m], self.frames[i][:, m:], self.local.sign)


def _rk4(spec, x0, t0, h):
    def rhs(t, x):
        lam = [Jet.constant(r(t), 0) for r in spec.rho]
        return x @ structure_matrix(lam, spec.sign).coeffs[0]

    k1 = rhs(t0, x0)
    k2 = rhs(t0 + h / 2, x0 + h / 2 * k1)
    k3 = rhs(t0 + h / 2, x0 + h / 2 * k2)
    k4 = rhs(t0 + h, x0 + h * k3)
    return x0 + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _graph_value(phi, m):
    """Graph matrix and chart of the span of the ``E`` columns at one point."""
    e = Jet(phi[None, :, :m], FLOAT)
    g = graph_from_basis(e)
    return g.S.value, g.chart


def synthesize_interval(spec, a, b, step=0.05, order=8, initial=None, method="taylor"):
    """Propagate the frame from ``a`` to ``b`` with a fixed step.

    Parameters
    ----------
    spec : CurvatureSpec
    a, b : float
        Start and end; ``b < a`` integrates backwards.
    step : float
        Positive step length; the last step is shortened to land on ``b``.
    order : int
        Taylor order per step.
    method : {"taylor", "rk4"}
        ``"rk4"`` is the fallback for curvatures that are only sampled.

    Returns
    -------
    SynthesisResult

    Raises
    ------
    ToleranceError
        If the Darboux residual of the frame exceeds ``1e-6``.
    """
    if step <= 0:
        raise SpecError("step must be positive")
    m = spec.m
    a = float(a)
    b = float(b)
    x = np.asarray(_coerce_initial(initial, m, FLOAT), dtype=np.float64)
    direction = 1.0 if b >= a else -1.0
    n = int(np.ceil(abs(b - a) / step - 1e-12)) if b != a else 0
    ts = [a]
    frames = [x.copy()]
    worst = 0.0
    t = a
    for k in range(n):
        t_next = b if k == n - 1 else a + direction * step * (k + 1)
        h = t_next - t
        if method == "taylor":
            lam = spec.jets(t, order - 1, FLOAT)
            c = structure_matrix(lam, spec.sign)
            coeffs = kernels.taylor_linear(x, c.coeffs, order)
            x = _make(Jet, coeffs, FLOAT, t).evaluate(h)
        elif method == "rk4":
            x = _rk4(spec, x, t, h)
        else:
            raise SpecError(f"unknown method {method!r}")
        t = t_next
        res = float(np.max(np.abs(darboux_defect(DarbouxFrame(x[:, :m], x[:, m:])))))
        worst = max(worst, res)
        if res > ABORT_RESIDUAL:
            raise ToleranceError(
                f"Darboux residual {res:.3e} at t={t:.6g} exceeds {ABORT_RESIDUAL:g}; reduce the step below {step:g}"
            )
        ts.append(t)
        frames.append(x.copy())
    frames = np.array(frames)
    S, charts = [], []
    for phi in frames:
        s, ch = _graph_value(phi, m)
        S.append(s)
        charts.append(ch)
    local = synthesize_local(spec, a, order, FLOAT, frames[0])
    meta = {"method": method, "step": step, "order": order if method == "taylor" else 4}
    return SynthesisResult(np.array(ts), frames, S, charts, local, worst, meta)


class LambdaCurve:
    """Curve source defined by prescribed curvatures.

    ``at(tau)`` returns the graph jet at ``tau``.  For ``tau != t0`` the
    frame is first carried to ``tau`` numerically (float ring only).
    """

    def __init__(self, spec, t0=0, step=0.05, initial=None):
        self.spec = spec
        self.t0 = t0
        self.step = step
        self.initial = initial
        self.m = spec.m

    def frame(self, tau, order, ring=FLOAT):
        ring = get_ring(ring)
        if tau == self.t0:
            return synthesize_local(self.spec, self.t0, order, ring, self.initial)
        if ring.exact:
            raise SpecError("the rational ring is only available at the start point")
        res = synthesize_interval(self.spec, float(self.t0), float(tau), self.step, initial=self.initial)
        return synthesize_local(self.spec, float(tau), order, FLOAT, res.frames[-1])

    def at(self, tau, order, ring=FLOAT):
        return graph_from_frame(self.frame(tau, order, ring))


@dataclass
class RoundtripReport:
    """Result of synthesizing a curve and recovering its curvatures."""

    m: int
    order: int
    requested_order: int
    compared_order: int
    lam_discrepancy: object
    frame_discrepancy: object
    frame_sign: int
    lam: list
    rho: list
    ring: str

    @property
    def complete(self):
        """True when every requested coefficient was available."""
        return self.compared_order >= self.requested_order

    @property
    def exact_match(self):
        return self.complete and self.lam_discrepancy == 0


def _max_diff(a, b, k):
    diff = a.truncate(k) - b.truncate(k)
    if diff.ring.exact:
        return max((abs(v) for v in diff.coeffs.reshape(-1)), default=0)
    return diff.max_abs()


def roundtrip(spec, t0=0, order=None, ring=FLOAT, compare_order=None):
    """Synthesize, convert to graph form and recover the curvatures.

    Parameters
    ----------
    compare_order : int, optional
        Highest jet coefficient compared, default ``order - 2m - 2``.

    Returns
    -------
    RoundtripReport
        Discrepancies are exact rationals on the rational ring.  When the
        recovered curvatures are shorter than ``compare_order`` (``m >= 3``,
        see :func:`lgi.frame.valid_order`) only the available coefficients
        are compared and ``complete`` is False.
    """
    ring = get_ring(ring)
    m = spec.m
    order = m * m + 2 * m + 2 if order is None else order
    k = order - 2 * m - 2 if compare_order is None else compare_order
    fc = synthesize_local(spec, t0, order, ring)
    g = graph_from_frame(fc)
    res = canonical_frame(g)
    kc = min(k, min(x.order for x in res.lam))
    if kc < 0:
        raise StructureError(f"jet order {order} is too short to recover any curvature coefficient")
    rho = spec.jets(ring.coerce(t0), order, ring)
    lam_d = max(_max_diff(l, r, kc) for l, r in zip(res.lam, rho))
    # frame comparison, up to the global sign
    E0 = fc.frame.E
    E1 = res.frame.frame.E
    kf = min(E0.order, E1.order)
    s = 1
    if _max_diff(E1, E0, kf) > _max_diff(E1, -E0, kf):
        s = -1
    fd = max(
        _max_diff(res.frame.frame.E, fc.frame.E * s, kf),
        _max_diff(res.frame.frame.F, fc.frame.F * s, min(kf, res.frame.frame.F.order)),
    )
    return RoundtripReport(m, order, k, kc, lam_d, fd, s, res.lam, rho, ring.name)
