import math
from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq

from lgi import linalg
from lgi.curves import ExprGraphCurve, graph_from_basis, graph_from_frame
from lgi.derivative_curve import (
    Laurent,
    affine_subtract,
    laurent_frame,
    compare_frames,
    derivative_subspace,
    w_function,
)
from lgi.errors import RankError, StructureError
from lgi.frame import canonical_frame
from lgi.symplectic import random_symplectic, rational_symplectic
from lgi.synthesis import CurvatureSpec, LambdaCurve, random_polynomial_spec, synthesize_local


def Q(rows):
    return np.array([[mpq(Fraction(v)) for v in r] for r in rows], dtype=object)


def transversal(q):
    """Basis of ``{(q y, y)}``."""
    m = q.shape[0]
    eye = Q(np.eye(m, dtype=int).tolist())
    return np.concatenate([q, eye], axis=0)


def x_plane(m):
    eye = Q(np.eye(m, dtype=int).tolist())
    return np.concatenate([eye, Q(np.zeros((m, m), dtype=int).tolist())], axis=0)


def rational_graph(spec, order):
    return graph_from_frame(synthesize_local(spec, 0, order, "rational"))


# -- affine structure ----------------------------------------------------------
def test_line_example():
    lam = np.array([[1.0], [0.0]])
    for g, d in ((2.0, 4.0), (-1.0, 3.0), (0.5, 0.25)):
        got = affine_subtract(np.array([[1.0], [g]]), np.array([[1.0], [d]]), lam)
        assert got[0, 0] == pytest.approx(1 / d - 1 / g)


def test_difference_of_graph_forms_exact():
    qa = Q([[1, Fraction(1, 2)], [Fraction(1, 2), 3]])
    qb = Q([[-2, 1], [1, Fraction(1, 3)]])
    got = affine_subtract(transversal(qa), transversal(qb), x_plane(2))
    assert np.all(got == qb - qa)


def test_zero_law_and_cocycle(rng):
    m = 3
    lam = x_plane(m)
    pts = []
    for _ in range(3):
        a = rng.integers(-3, 4, size=(m, m))
        pts.append(transversal(Q((a + a.T).tolist())))
    g, d, e = pts
    assert np.all(affine_subtract(g, g, lam) == 0)
    assert np.all(affine_subtract(g, d, lam) == -affine_subtract(d, g, lam))
    assert np.all(affine_subtract(g, d, lam) + affine_subtract(d, e, lam) == affine_subtract(g, e, lam))


def test_difference_does_not_depend_on_bases(rng):
    lam = np.vstack([np.eye(2), np.zeros((2, 2))])
    qa, qb = rng.standard_normal((2, 2, 2))
    ga = np.vstack([qa + qa.T, np.eye(2)])
    gb = np.vstack([qb + qb.T, np.eye(2)])
    p = rng.standard_normal((2, 2)) + 3 * np.eye(2)
    assert np.allclose(affine_subtract(ga @ p, gb, lam), affine_subtract(ga, gb, lam))


def test_non_transversal_is_rejected():
    lam = np.array([[1.0], [0.0]])
    with pytest.raises(RankError):
        affine_subtract(lam, np.array([[0.0], [1.0]]), lam)


# -- Laurent helper ------------------------------------------------------------
def test_laurent_coefficients_and_pole():
    lau = Laurent([0.0, 2.0, 1.0, 5.0], -3)
    assert lau.coefficient(-3) == 0.0
    assert lau.coefficient(-2) == 2.0
    assert lau.coefficient(0) == 5.0
    assert lau.pole_order() == 2


# -- derivative subspace -------------------------------------------------------
def test_derivative_subspace_of_straight_line():
    ds = derivative_subspace(ExprGraphCurve([["t"]]).at(0, 4, "rational"))
    assert ds.weight == 1
    assert linalg.same_span(ds.basis, np.array([[0], [1]], dtype=object))


def test_derivative_subspace_of_tangent_at_zero():
    ds = derivative_subspace(ExprGraphCurve([["tan(t)"]]).at(0, 8, "rational"))
    # 1 / tan(t) = 1/t - t/3 - ... has zero free term
    assert ds.inverse.coefficient(0)[0, 0] == 0
    assert ds.inverse.coefficient(1)[0, 0] == Fraction(-1, 3)
    assert linalg.same_span(ds.basis, np.array([[0], [1]], dtype=object))
    assert ds.free_term_residual == 0


@pytest.mark.parametrize("tau", [0.3, -0.6])
def test_derivative_subspace_rotates_with_the_tangent_curve(tau):
    ds = derivative_subspace(ExprGraphCurve([["tan(t)"]]).at(tau, 10, "float"))
    expected = np.array([[-math.sin(tau)], [math.cos(tau)]])
    assert linalg.same_span(ds.basis, expected)
    assert ds.free_term_residual < 1e-12


@pytest.mark.parametrize("m", [1, 2, 3])
def test_derivative_subspace_is_transversal(m):
    spec = random_polynomial_spec(m, np.random.default_rng(40 + m))
    g = rational_graph(spec, 2 * m * m + 2)
    ds = derivative_subspace(g)
    assert ds.weight == m * m
    assert ds.free_term_residual == 0
    both = np.concatenate([ds.basis, ds.lam_basis], axis=1).astype(float)
    assert np.linalg.matrix_rank(both) == 2 * m


def test_short_jet_is_rejected():
    with pytest.raises(StructureError, match="too short"):
        derivative_subspace(ExprGraphCurve([["t"]]).at(0, 1, "rational"), k=1)


# -- w function and the Laurent frame -------------------------------------------
@pytest.mark.parametrize("m", [1, 2, 3])
def test_pole_order_equals_dimension(m):
    spec = random_polynomial_spec(m, np.random.default_rng(50 + m))
    g = rational_graph(spec, 2 * m * m + 2)
    wf = w_function(g)
    assert wf.pole_order == m
    assert wf.sign == 1
    assert linalg.same_span(wf.e, g.basis().value)


def test_decreasing_curve_reports_negative_velocity():
    wf = w_function(ExprGraphCurve([["-t"]]).at(0, 4, "rational"))
    assert wf.sign == -1


def test_regular_curve_is_rejected():
    with pytest.raises(RankError):
        w_function(ExprGraphCurve([["t", "0"], [None, "t"]]).at(0, 6, "rational"))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_laurent_frame_is_darboux(m):
    spec = random_polynomial_spec(m, np.random.default_rng(60 + m))
    af = laurent_frame(rational_graph(spec, 2 * m * m + 2))
    assert af.darboux_residual == 0
    assert linalg.same_span(af.f, af.derivative.basis)
    d = af.to_dict()
    assert d["pole_order"] == m and d["weight"] == m * m


def test_first_vector_is_parallel_to_canonical_frame():
    spec = CurvatureSpec(["1 - t", "1/2 + t^2"])
    g = rational_graph(spec, 14)
    e1 = laurent_frame(g).e[:, 0]
    E1 = canonical_frame(g).frame.frame.E.value[:, 0]
    for i in range(4):
        for j in range(i + 1, 4):
            assert e1[i] * E1[j] - e1[j] * E1[i] == 0


@pytest.mark.parametrize("m", [1, 2])
def test_laurent_frame_is_equivariant(m):
    spec = random_polynomial_spec(m, np.random.default_rng(70 + m))
    g = rational_graph(spec, 2 * m * m + 2)
    a = rational_symplectic(random_symplectic(m, seed=m), 16)
    moved = graph_from_basis(a @ g.basis())
    before = laurent_frame(g)
    after = laurent_frame(moved)
    sign = 1 if np.all(after.e == a @ before.e) else -1
    assert np.all(after.e == sign * (a @ before.e))
    assert np.all(after.f == sign * (a @ before.f))


def test_proportionality_along_a_grid():
    src = LambdaCurve(CurvatureSpec(["1 + t/2", "t - 1/3"]))
    rep = compare_frames(src, np.linspace(0.0, 0.4, 5))
    assert rep.pole_orders == [2] * 5
    assert rep.parallel_residual < 1e-8
    assert rep.max_derivative < 1e-8
    assert abs(rep.constant) > 0


def test_compare_frames_needs_a_grid():
    with pytest.raises(ValueError):
        compare_frames(LambdaCurve(CurvatureSpec(["1"])), [0.0, 0.1])
