import numpy as np
import pytest

from lgi import linalg
from lgi.curves import (
    ExprGeneratorCurve,
    ExprGraphCurve,
    ampleness,
    contraction,
    extension,
    flag,
    generator_from_graph,
    graph_from_basis,
    graph_from_frame,
    rank_at,
    symplectify,
    velocity_form,
    weight,
)
from lgi.errors import NotAmpleError, StructureError
from lgi.series import Jet, jet_stack
from lgi.symplectic import sigma
from lgi.synthesis import CurvatureSpec, LambdaCurve, random_polynomial_spec, synthesize_local


def graph(entries, order=8, ring="float", at=0):
    return ExprGraphCurve(entries).at(at, order, ring)


def flat_curve(m, order=None, ring="rational"):
    """Curve synthesized with every curvature zero."""
    return synthesize_local(CurvatureSpec(["0"] * m), 0, order, ring)


def test_velocity_of_identity_graph():
    assert np.allclose(velocity_form(graph([["t"]])), [[1.0]])


def test_velocity_of_constant_curve():
    g = graph([["2", "1"], [None, "3"]])
    assert np.allclose(velocity_form(g), 0)
    assert rank_at(g) == 0


def test_velocity_matches_section_difference_quotient(rng):
    src = ExprGraphCurve([["sin(t)", "t^2"], [None, "exp(t) - t"]])
    t0 = 0.3
    form = velocity_form(src.at(t0, 3))

    def section(t, x):
        s = src.at(t, 0).S.value
        return np.concatenate([x, s @ x])

    for _ in range(3):
        x = rng.standard_normal(2)
        errs = []
        for h in (1e-2, 5e-3):
            deriv = (section(t0 + h, x) - section(t0 - h, x)) / (2 * h)
            errs.append(abs(sigma(deriv, section(t0, x)) - x @ form @ x))
        assert errs[0] < 1e-3
        assert errs[1] < errs[0] / 3  # second order


@pytest.mark.parametrize("m", [1, 2, 3])
def test_synthesized_curves_have_rank_one(m):
    spec = random_polynomial_spec(m, np.random.default_rng(m))
    src = LambdaCurve(spec)
    for tau in (0.0, 0.2, 0.5):
        assert rank_at(src.at(tau, 4)) == 1


def test_identity_graph_has_rank_and_weight_one():
    g = graph([["t"]])
    assert rank_at(g) == 1
    assert weight(g) == 1


@pytest.mark.parametrize("m, expected", [(1, 1), (2, 4), (3, 9)])
def test_weight_of_flat_curves(m, expected):
    assert weight(graph_from_frame(flat_curve(m))) == expected


def test_weight_at_generic_points_of_random_curves():
    spec = random_polynomial_spec(3, np.random.default_rng(7))
    src = LambdaCurve(spec)
    for tau in (0.0, 0.35, -0.4):
        assert weight(src.at(tau, 12)) == 9


def test_flat_curve_determinant_is_quartic():
    # brute force: 2 x 2 determinant of S(t) - S(0) from its entries
    g = graph_from_frame(flat_curve(2, 10))
    s = g.S - g.S.value
    det = s[0, 0] * s[1, 1] - s[0, 1] * s[1, 0]
    assert det.valuation() == 4


def test_not_ample():
    rep = ampleness(graph([["1"]], order=6))
    assert not rep.ample
    assert "order 6" in str(rep)
    with pytest.raises(NotAmpleError):
        weight(graph([["1"]], order=6))


def test_extension_zero_is_the_curve():
    fc = flat_curve(2)
    assert linalg.same_span(extension(fc, 0), fc.frame.E.value)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_flag_dimensions(m):
    fl = flag(graph_from_frame(flat_curve(m)))
    assert [b.shape[1] for b in fl.extensions] == [m + i for i in range(m + 1)]
    assert [b.shape[1] for b in fl.contractions] == [m - i for i in range(m + 1)]


def test_rank_equals_first_extension_step():
    g = graph_from_frame(flat_curve(3))
    assert extension(g, 1).shape[1] - extension(g, 0).shape[1] == rank_at(g)


def test_first_contraction_is_kernel_of_velocity():
    g = graph_from_frame(flat_curve(2, ring="float"))
    ker = contraction(g, 1)
    # vectors of the curve on which the velocity form vanishes
    v = velocity_form(g)
    null = linalg.nullspace(np.asarray(v, dtype=float))
    expected = np.vstack([null, np.asarray(g.S.value, dtype=float) @ null])
    assert linalg.same_span(ker, expected)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("ring", ["rational", "float"])
def test_contraction_routes_agree(m, ring):
    spec = random_polynomial_spec(m, np.random.default_rng(10 + m))
    g = graph_from_frame(synthesize_local(spec, 0, 2 * m * m + 2, ring))
    for i in range(m + 1):
        dual = contraction(g, i, route="dual")
        direct = contraction(g, i, route="sections")
        assert dual.shape[1] == direct.shape[1] == m - i
        if m - i:
            assert linalg.same_span(dual, direct)


def test_frame_of_rotation_gives_tangent():
    t = Jet([0.0, 1.0] + [0.0] * 9)
    s, c = t.sincos()
    basis = jet_stack([jet_stack([c]), jet_stack([s])])
    g = graph_from_basis(basis)
    assert np.allclose(np.asarray(g.S.coeffs, dtype=float).reshape(-1), t.tan().coeffs)


def test_constant_frame_gives_zero_graph():
    eye = Jet.constant(np.eye(4)[:, :2], 3)
    assert np.allclose(graph_from_basis(eye).S.coeffs, 0)


def test_flat_graph_is_exactly_symmetric():
    g = graph_from_frame(flat_curve(2, 9))
    assert np.all(g.S.coeffs == np.transpose(g.S.coeffs, (0, 2, 1)))
    # S times the x block of E reproduces the y block exactly
    E = flat_curve(2, 9).frame.E
    top, bottom = E[:2], E[2:]
    prod = g.S @ top.truncate(g.S.order)
    assert np.all((prod - bottom.truncate(g.S.order)).coeffs == 0)


def test_graph_needs_a_chart_when_vertical():
    # span(f_1) in m = 1 is not a graph over x
    basis = Jet.constant(np.array([[0.0], [1.0]]), 3)
    g = graph_from_basis(basis)
    assert g.chart == (0,)
    assert np.allclose(g.basis().value.reshape(-1) / g.basis().value[1, 0], [0, 1])


def test_generator_of_line_curve_is_its_section():
    g = graph([["t^3/3 + t"]])
    eps = generator_from_graph(g).eps
    # proportional to (1, S(t))
    assert np.allclose(eps.coeffs[:, 1], g.S.coeffs[:, 0, 0] * eps.coeffs[0, 0])


def test_generator_of_flat_curve_is_first_frame_vector():
    fc = flat_curve(2, 10)
    eps = generator_from_graph(graph_from_frame(fc)).eps
    E1 = fc.frame.E[:, 0]
    k = min(eps.order, E1.order)
    ratio = eps.coeffs[0, 0] / E1.coeffs[0, 0]
    assert np.all((eps.truncate(k) - E1.truncate(k) * ratio).coeffs[:3] == 0)
    # proportional as a jet: the 2 x 2 minors vanish to the retained order
    for i in range(4):
        for j in range(i + 1, 4):
            minor = eps[i] * E1[j].truncate(k) - eps[j] * E1[i].truncate(k)
            assert np.all(minor.coeffs == 0)


def test_regular_curve_has_no_generator():
    g = graph([["t", "0"], [None, "t"]])
    with pytest.raises(StructureError, match="expected 1"):
        generator_from_graph(g)


def test_generator_from_expressions_round_trips_span():
    # the first frame vector of the flat m = 2 curve, components (x1, x2, y1, y2)
    src = ExprGeneratorCurve(["1", "t", "-t^3/6", "t^2/2"])
    gen = src.at(0, 6, "rational")
    g = graph_from_basis(gen.basis())
    assert weight(g) == 4


def test_symplectify_constant_curve_is_constant():
    a = Jet.constant(np.array([[1.0, 2.0], [0.0, 1.0]]), 3)
    g = symplectify(a)
    assert np.allclose(g.S.coeffs[1:], 0)


def test_symplectify_is_lagrangian():
    a = Jet(np.array([np.eye(2), [[0.0, 1.0], [2.0, 0.0]], np.zeros((2, 2))]))
    g = symplectify(a)
    b = g.basis()
    assert np.allclose(sigma(b, b).coeffs, 0)


def test_symplectify_line_in_plane():
    a = Jet([[[0.0]], [[1.0]], [[0.0]], [[0.0]], [[0.0]]])  # span(1, t)
    g = symplectify(a)
    assert g.m == 2
    rep = ampleness(g)
    assert rep.order == g.order
