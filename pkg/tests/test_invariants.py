import math
from fractions import Fraction

import numpy as np
import pytest

from lgi.curves import ExprGraphCurve, graph_from_basis, graph_from_frame
from lgi.errors import DomainError, NotDivisibleError
from lgi.frame import canonical_frame
from lgi.invariants import (
    cross_ratio,
    gamma_coefficients,
    gamma_structure_check,
    generating_function,
    graph_cross_ratio,
    principal_curvatures,
    probe_lambda_beta,
    trace_asymptotic_check,
)
from lgi.series import Jet
from lgi.symplectic import random_symplectic, rational_symplectic
from lgi.synthesis import CurvatureSpec, LambdaCurve, synthesize_local

# csc(w)^2 - 1/w^2, the generating function of the tangent curve
CSC_SQUARED_MINUS_POLE = [Fraction(1, 3), 0, Fraction(1, 15), 0, Fraction(2, 189), 0, Fraction(1, 675)]


def graph(entries, order, ring="rational", at=0):
    return ExprGraphCurve(entries).at(at, order, ring)


def as_fractions(values):
    return [Fraction(int(v.numerator), int(v.denominator)) for v in values]


def test_tangent_principal_curvatures_exact():
    gf = generating_function(graph([["tan(t)"]], 9))
    assert gf.k == 1
    assert gf.degree == 6
    assert as_fractions(principal_curvatures(gf)) == CSC_SQUARED_MINUS_POLE


@pytest.mark.parametrize("t0", [0.0, 0.4, -0.7])
def test_tangent_principal_curvatures_do_not_depend_on_base_point(t0):
    gf = generating_function(graph([["tan(t)"]], 9, "float", at=t0))
    assert np.allclose(np.array(gf.beta(), dtype=float), [float(v) for v in CSC_SQUARED_MINUS_POLE], atol=1e-9)


def test_tangent_expansion_in_both_variables():
    # g depends on t0 - t1 only, so no coefficient involving b survives
    gf = generating_function(graph([["tan(t)"]], 9))
    c = gf.jet.coeffs
    assert all(c[p, q] == 0 for p in range(c.shape[0]) for q in range(1, c.shape[1]))


def test_scaled_tangent():
    gf = generating_function(graph([["tan(2*t)/2"]], 8))
    beta = as_fractions(gf.beta(3))
    # 4 csc(2w)^2 - 1/w^2 = 4/3 + 16 w^2 / 15 + ...
    assert beta == [Fraction(4, 3), 0, Fraction(16, 15)]


def test_straight_line_has_zero_generating_function():
    gf = generating_function(graph([["t"]], 8))
    assert np.all(gf.jet.coeffs == 0)


def test_symmetry_fixes_first_odd_coefficient():
    # g(t0, t1) = g(t1, t0) forces beta_1 = beta_0' / 2
    spec = CurvatureSpec(["1 + t", "t^2 - 1/2"])
    g = graph_from_frame(synthesize_local(spec, 0, 14, "rational"))
    c = generating_function(g).jet.coeffs
    assert c[1, 0] != 0
    assert c[1, 0] == c[0, 1] / 2


def test_expansion_is_symmetric():
    spec = CurvatureSpec(["1 - t/2", "1/3"])
    gf = generating_function(graph_from_frame(synthesize_local(spec, 0, 24, "float")))
    for t0, t1 in ((0.05, 0.01), (-0.02, 0.04)):
        assert float(gf(t0, t1)) == pytest.approx(float(gf(t1, t0)), rel=1e-8)


def test_weight_mismatch_is_reported():
    with pytest.raises(NotDivisibleError, match="weight mismatch"):
        generating_function(graph([["t"]], 8), k=2)


def test_short_jet_is_rejected():
    with pytest.raises(DomainError):
        generating_function(graph([["tan(t)"]], 2))


def test_asking_for_too_many_curvatures():
    gf = generating_function(graph([["tan(t)"]], 6))
    with pytest.raises(DomainError):
        gf.beta(10)


def numeric_generating_function(section, k, t0, t1, h):
    """Central second difference of ``ln(det(S(t0) - S(t1)) / (t0 - t1)^k)``."""

    def f(a, b):
        return math.log(abs(np.linalg.det(section(a) - section(b)) / (a - b) ** k))

    return (f(t0 + h, t1 + h) - f(t0 + h, t1 - h) - f(t0 - h, t1 + h) + f(t0 - h, t1 - h)) / (4 * h * h)


@pytest.mark.parametrize(
    "entries",
    [
        [["tan(t)"]],
        [["sin(t) + t", "t^2/2"], [None, "exp(t) - 1"]],
        [["t", "t^2/2"], [None, "t^3/3"]],
    ],
)
def test_generating_function_against_finite_differences(entries):
    src = ExprGraphCurve(entries)
    gf = generating_function(src.at(0.0, 26, "float"))

    def section(t):
        return np.asarray(src.at(t, 0, "float").S.value, dtype=float)

    t0, t1 = 0.15, 0.05
    series = float(gf(t0, t1))
    errs = [abs(numeric_generating_function(section, gf.k, t0, t1, h) - series) for h in (1e-2, 5e-3)]
    assert errs[1] < 1e-4
    # second order convergence of the difference quotient, unless already at roundoff
    assert errs[1] < max(errs[0] / 3, 1e-9)


# -- cross-ratio ------------------------------------------------------------
def tangent_point(t):
    """Basis of the tangent curve at t and its tangent vector as a 1 x 1 form."""
    return np.array([[1.0], [math.tan(t)]]), np.array([[1.0 / math.cos(t) ** 2]])


def test_zero_tangent_vector_gives_zero_operator():
    l0, _ = tangent_point(0.1)
    l1, v1 = tangent_point(0.6)
    assert np.all(cross_ratio(l0, [[0.0]], l1, v1).matrix == 0)


@pytest.mark.parametrize("t0, t1", [(0.1, 0.6), (-0.3, 0.2), (0.5, 0.45)])
def test_tangent_cross_ratio_trace(t0, t1):
    l0, v0 = tangent_point(t0)
    l1, v1 = tangent_point(t1)
    tr = cross_ratio(l0, v0, l1, v1).trace
    assert tr == pytest.approx(-1.0 / math.sin(t0 - t1) ** 2, rel=1e-10)


def test_graph_shortcut_agrees(rng):
    a = rng.standard_normal((2, 2))
    s0, s1 = a + a.T, np.zeros((2, 2))
    v0 = np.array([[1.0, 0.3], [0.3, 2.0]])
    v1 = np.array([[0.5, 0.0], [0.0, 1.0]])
    eye = np.eye(2)
    full = cross_ratio(np.vstack([eye, s0]), v0, np.vstack([eye, s1]), v1).matrix
    short = graph_cross_ratio(s0 - s1, v0, v1).matrix
    assert np.allclose(full, short)


def random_pair(rng, m):
    a = random_symplectic(m, seed=int(rng.integers(1000)))
    q0, q1 = rng.standard_normal((2, m, m))
    return a[:, :m], q0 + q0.T, a[:, m:], q1 + q1.T


@pytest.mark.parametrize("m", [1, 2, 3])
def test_trace_is_symplectic_invariant(rng, m):
    l0, v0, l1, v1 = random_pair(rng, m)
    before = cross_ratio(l0, v0, l1, v1).trace
    for seed in range(3):
        a = random_symplectic(m, seed=seed)
        assert cross_ratio(a @ l0, v0, a @ l1, v1).trace == pytest.approx(before, rel=1e-9, abs=1e-9)


def test_trace_does_not_depend_on_bases(rng):
    m = 2
    l0, v0, l1, v1 = random_pair(rng, m)
    before = cross_ratio(l0, v0, l1, v1).trace
    p0, p1 = rng.standard_normal((2, m, m)) + 2 * np.eye(m)
    after = cross_ratio(l0 @ p0, p0.T @ v0 @ p0, l1 @ p1, p1.T @ v1 @ p1).trace
    assert after == pytest.approx(before, rel=1e-9)


def test_docstring_example_by_hand():
    # B01 = sigma((1,0), (1,1)) = 1 and B10 = -1, so the operator is -1
    op = cross_ratio([[1.0], [0.0]], [[1.0]], [[1.0], [1.0]], [[1.0]])
    assert op.matrix[0, 0] == pytest.approx(-1.0)


@pytest.mark.parametrize("bound", [None, 16])
def test_generating_function_is_invariant_under_exact_maps(bound):
    g = graph([["tan(t)"]], 10)
    a = rational_symplectic(random_symplectic(1, seed=2), bound)
    moved = graph_from_basis(a @ g.basis())
    assert generating_function(moved).beta() == generating_function(g).beta()


def test_generating_function_is_invariant_under_maps_m2():
    spec = CurvatureSpec(["1 + t", "t^2 - 1/2"])
    g = graph_from_frame(synthesize_local(spec, 0, 12, "rational"))
    a = rational_symplectic(random_symplectic(2, seed=4), 32)
    moved = graph_from_basis(a @ g.basis())
    assert generating_function(moved).beta() == generating_function(g).beta()


def test_trace_asymptotics_on_tangent():
    rep = trace_asymptotic_check(ExprGraphCurve([["tan(t)"]]), t=0.2)
    assert rep.k == 1
    assert rep.max_residual < 1e-9
    assert len(rep.points) == 100


def test_trace_asymptotics_on_synthesized_curve():
    src = LambdaCurve(CurvatureSpec(["1 - t/2", "1/3"]))
    rep = trace_asymptotic_check(src, t=0.1, window=0.2)
    assert rep.k == 4
    assert rep.max_residual < 1e-6


# -- relation with the modified curvatures ------------------------------------
def test_relation_constant_for_lines():
    # lam_1 = -1 and beta_0 = 1/3 for the tangent curve
    (est,) = probe_lambda_beta(1, [-1, 1, 2, -3, 0.5])
    assert est.C == pytest.approx(-3.0, abs=1e-12)
    assert est.spread < 1e-8
    assert est.lam[0] == pytest.approx(-1.0)
    assert est.beta[0] == pytest.approx(1 / 3)


def test_relation_constant_for_planes():
    est = probe_lambda_beta(2, [1, -1, 2, 0.5, -2], i=[1, 2])
    assert all(e.spread < 1e-8 for e in est)
    # measured values, recorded to catch regressions
    assert est[0].C == pytest.approx(-7.5, rel=1e-9)
    assert est[1].C == pytest.approx(-35.0, rel=1e-9)
    assert all(b == [0.0, 0.0] for b in est[1].lower_beta)


def test_probe_rejects_bad_index():
    with pytest.raises(ValueError):
        probe_lambda_beta(2, [1.0], i=3)


def test_scaled_tangent_fits_the_relation():
    g = graph([["tan(2*t)/2"]], 10)
    lam = canonical_frame(g).lam[0].coeffs[0]
    beta = generating_function(g).beta(1)[0]
    assert lam == -4
    assert lam / beta == -3


# -- Gamma coefficients --------------------------------------------------------
def test_gamma_of_circle():
    t = Jet([0.0, 1.0] + [0.0] * 10)
    s, c = t.sincos()
    from lgi.series import jet_stack

    gam = gamma_coefficients(jet_stack([c, s]), 1)
    assert np.allclose(gam[0].coeffs, [-1.0] + [0.0] * gam[0].order, atol=1e-12)
    assert np.allclose(gam[1].coeffs, 0.0, atol=1e-12)


@pytest.mark.parametrize("rho", [["0", "2 - t"], ["0", "0", "1 + t^2"], ["t", "1"]])
def test_gamma_pattern(rho):
    m = len(rho)
    fc = synthesize_local(CurvatureSpec(rho), 0, 4 * m + 8, "rational")
    res = canonical_frame(graph_from_frame(fc))
    rep = gamma_structure_check(res.frame, res.lam)
    assert rep.applicable[0]
    assert rep.residual[0] == 0
    assert rep.ok


def test_gamma_pattern_for_planes_by_hand():
    # E1'''' = -lam_2 E1 + lam_1' E2 + lam_1 E1''
    spec = CurvatureSpec(["1 + t", "2"])
    fc = synthesize_local(spec, 0, 14, "rational")
    gam = gamma_coefficients(fc.frame.E[:, 0], 2)
    lam1, lam2 = spec.jets(0, gam[0].order + 1, "rational")
    k = gam[0].order
    assert np.all((gam[0] + lam2.truncate(k)).coeffs == 0)
    assert np.all((gam[1] - lam1.derive().truncate(k)).coeffs == 0)
    assert np.all((gam[2] - lam1.truncate(k)).coeffs == 0)
    assert np.all(gam[3].coeffs == 0)
