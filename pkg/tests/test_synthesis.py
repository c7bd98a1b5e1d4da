import math
from fractions import Fraction

import numpy as np
import pytest

from lgi.curves import graph_from_frame
from lgi.errors import SpecError, ToleranceError
from lgi.frame import canonical_frame
from lgi.symplectic import is_darboux, random_symplectic, rational_symplectic, sigma
from lgi.synthesis import (
    CurvatureSpec,
    LambdaCurve,
    parse_curvature,
    random_polynomial_spec,
    roundtrip,
    synthesize_interval,
    synthesize_local,
)


def exact(j):
    return [Fraction(int(c.numerator), int(c.denominator)) for c in j.coeffs.reshape(-1)]


def poly(coeffs, order):
    out = [Fraction(c) for c in coeffs] + [Fraction(0)] * (order + 1)
    return out[: order + 1]


@pytest.mark.parametrize(
    "src, text_value",
    [
        ([1, "3/2", 0, 2], (Fraction(1, 2), 1 + Fraction(3, 4) + Fraction(1, 4))),
        ([0.25], (Fraction(7), Fraction(1, 4))),
        ([], (Fraction(3), 0)),
        ("t^2 - 1", (Fraction(2), 3)),
        (Fraction(2, 3), (Fraction(5), Fraction(2, 3))),
    ],
)
def test_parse_curvature(src, text_value):
    at, value = text_value
    j = parse_curvature(src).jet(0, 0, "rational")
    assert j.ring.name == "rational"
    got = parse_curvature(src).jet(at, 0, "rational").value
    assert got == value


def test_spec_validation():
    with pytest.raises(SpecError):
        CurvatureSpec([])
    with pytest.raises(SpecError):
        CurvatureSpec(["1"], sign=2)
    assert CurvatureSpec(["1", [0, 1]]).m == 2


def test_random_spec_is_reproducible():
    a = random_polynomial_spec(3, np.random.default_rng(1))
    b = random_polynomial_spec(3, np.random.default_rng(1))
    assert a.texts() == b.texts()


# -- local jets -------------------------------------------------------------
def test_flat_plane_curve_is_polynomial():
    # E1 = e1 + t e2 + t^2/2 f2 - t^3/6 f1 in coordinates (x1, x2, y1, y2)
    fc = synthesize_local(CurvatureSpec(["0", "0"]), 0, 8, "rational")
    E1 = fc.frame.E[:, 0]
    k = E1.order
    assert exact(E1[0]) == poly([1], k)
    assert exact(E1[1]) == poly([0, 1], k)
    assert exact(E1[2]) == poly([0, 0, 0, Fraction(-1, 6)], k)
    assert exact(E1[3]) == poly([0, 0, Fraction(1, 2)], k)


def test_rotating_line():
    fc = synthesize_local(CurvatureSpec(["-1"]), 0, 10, "rational")
    E, F = fc.frame.E[:, 0], fc.frame.F[:, 0]
    cos = [Fraction((-1) ** (n // 2), math.factorial(n)) if n % 2 == 0 else 0 for n in range(11)]
    sin = [Fraction((-1) ** (n // 2), math.factorial(n)) if n % 2 else 0 for n in range(11)]
    assert exact(E[0]) == cos and exact(E[1]) == sin
    assert exact(F[0]) == [-v for v in sin] and exact(F[1]) == cos


@pytest.mark.parametrize("m", [1, 2, 3])
def test_local_frame_is_darboux_exactly(m):
    spec = random_polynomial_spec(m, np.random.default_rng(20 + m))
    fc = synthesize_local(spec, Fraction(1, 3), 10, "rational")
    rep = is_darboux(fc.frame)
    assert rep and rep.residual == 0


def test_local_frame_satisfies_equations():
    spec = CurvatureSpec(["1 - t", "t^2"])
    fc = synthesize_local(spec, 0, 10, "rational")
    E, F = fc.frame.E, fc.frame.F
    lam1, lam2 = spec.jets(0, 10, "rational")
    dE, dF = E.derive(), F.derive()
    k = dE.order
    assert np.all((dE[:, 0] - E[:, 1].truncate(k)).coeffs == 0)
    assert np.all((dE[:, 1] - F[:, 1].truncate(k)).coeffs == 0)
    assert np.all((dF[:, 0] - E[:, 0].truncate(k) * lam2.truncate(k)).coeffs == 0)
    assert np.all((dF[:, 1] - E[:, 1].truncate(k) * lam1.truncate(k) + F[:, 0].truncate(k)).coeffs == 0)


def test_initial_frame_is_transported(rng):
    spec = CurvatureSpec(["1/2", "t - 1"])
    a = rational_symplectic(random_symplectic(2, seed=7), 32)
    plain = synthesize_local(spec, 0, 8, "rational")
    moved = synthesize_local(spec, 0, 8, "rational", initial=a)
    assert np.all((moved.frame.E - a @ plain.frame.E).coeffs == 0)
    assert np.all((moved.frame.F - a @ plain.frame.F).coeffs == 0)


def test_moved_curve_has_same_curvatures():
    spec = CurvatureSpec(["1/2", "t - 1"])
    a = rational_symplectic(random_symplectic(2, seed=7), 32)
    lam = canonical_frame(graph_from_frame(synthesize_local(spec, 0, 16, "rational", initial=a))).lam
    for got, want in zip(lam, spec.jets(0, lam[0].order, "rational")):
        assert exact(got) == exact(want)


def test_negated_initial_frame_negates_everything():
    spec = CurvatureSpec(["t", "1"])
    plain = synthesize_local(spec, 0, 8, "rational")
    neg = synthesize_local(spec, 0, 8, "rational", initial=-np.eye(4, dtype=int))
    assert np.all((neg.frame.matrix() + plain.frame.matrix()).coeffs == 0)


def test_non_darboux_initial_frame_is_rejected():
    with pytest.raises(SpecError, match="not Darboux"):
        synthesize_local(CurvatureSpec(["1"]), 0, 4, initial=2 * np.eye(2))
    with pytest.raises(SpecError):
        synthesize_local(CurvatureSpec(["1"]), 0, 4, initial=np.eye(4))


# -- interval propagation ------------------------------------------------------
def test_rotating_line_over_unit_interval():
    res = synthesize_interval(CurvatureSpec(["-1"]), 0, 1)
    assert len(res.t) == 21
    expected = np.stack([np.cos(res.t), np.sin(res.t)], axis=1)
    assert np.max(np.abs(res.frames[:, :, 0] - expected)) < 1e-9
    # graph of span(cos, sin) is tan
    assert np.allclose([s[0, 0] for s in res.S], np.tan(res.t), atol=1e-9)


def test_flat_curve_is_exact_at_machine_precision():
    res = synthesize_interval(CurvatureSpec(["0", "0"]), 0, 1)
    t = res.t
    expected = np.stack([np.ones_like(t), t, -(t**3) / 6, t**2 / 2], axis=1)
    assert np.max(np.abs(res.frames[:, :, 0] - expected)) < 1e-14


def test_forward_then_backward_returns():
    spec = random_polynomial_spec(3, np.random.default_rng(3))
    fwd = synthesize_interval(spec, 0, 1)
    back = synthesize_interval(spec, 1, 0, initial=fwd.frames[-1])
    assert back.t[-1] == 0
    assert np.max(np.abs(back.frames[-1] - np.eye(6))) < 1e-8


def test_step_does_not_matter():
    spec = CurvatureSpec(["1 + t^2", "-t"])
    a = synthesize_interval(spec, 0, 1, step=0.05)
    b = synthesize_interval(spec, 0, 1, step=0.02)
    assert np.max(np.abs(a.frames[-1] - b.frames[-1])) < 1e-9


def test_rk4_agrees_with_taylor():
    spec = CurvatureSpec(["1 + t^2", "-t"])
    a = synthesize_interval(spec, 0, 1, step=0.01, method="rk4")
    b = synthesize_interval(spec, 0, 1)
    assert np.max(np.abs(a.frames[-1] - b.frames[-1])) < 1e-7
    assert a.metadata["order"] == 4


def test_frames_stay_darboux():
    spec = random_polynomial_spec(2, np.random.default_rng(5))
    res = synthesize_interval(spec, -0.5, 0.5)
    assert res.darboux_residual < 1e-12
    assert is_darboux(res.frame_at(len(res.t) - 1), 1e-12)


def test_pairings_stay_constant():
    res = synthesize_interval(CurvatureSpec(["2 - t", "t^3"]), 0, 1)
    for phi in res.frames[::5]:
        # sigma(F_i, E_j) = delta_ij
        assert np.allclose(sigma(phi[:, 2:], phi[:, :2]), np.eye(2), atol=1e-12)


def test_bad_inputs():
    with pytest.raises(SpecError):
        synthesize_interval(CurvatureSpec(["1"]), 0, 1, step=0)
    with pytest.raises(SpecError, match="unknown method"):
        synthesize_interval(CurvatureSpec(["1"]), 0, 1, method="euler")


def test_oversized_step_aborts():
    with pytest.raises(ToleranceError, match="reduce the step"):
        synthesize_interval(CurvatureSpec(["-400"]), 0, 2, step=1.0)


def test_lambda_curve_sources():
    src = LambdaCurve(CurvatureSpec(["-1"]))
    g = src.at(0.3, 6)
    assert g.S.value[0, 0] == pytest.approx(math.tan(0.3), abs=1e-10)
    with pytest.raises(SpecError):
        src.at(0.3, 6, "rational")


# -- roundtrip ------------------------------------------------------------------
def test_exact_roundtrip_for_planes():
    rep = roundtrip(CurvatureSpec(["t", "1 - t^2"]), ring="rational")
    assert rep.exact_match
    assert rep.frame_discrepancy == 0


def test_float_roundtrip_in_three_dimensions():
    spec = random_polynomial_spec(3, np.random.default_rng(11))
    rep = roundtrip(spec, order=22)
    assert rep.lam_discrepancy < 1e-6


def test_roundtrip_with_negative_sign():
    spec = CurvatureSpec(["1"], sign=-1)
    fc = synthesize_local(spec, 0, 10, "rational")
    # E' = -F and F' = E give E = cos e - sin f
    assert exact(fc.frame.E[1, 0])[:4] == [0, -1, 0, Fraction(1, 6)]
    res = canonical_frame(graph_from_frame(fc))
    assert res.sign == -1
    assert exact(res.lam[0]) == [1] + [0] * res.lam[0].order
    rep = roundtrip(spec, ring="rational", order=10)
    assert rep.exact_match and rep.frame_discrepancy == 0


def test_roundtrip_reports_incomplete_comparison():
    spec = CurvatureSpec(["1", "t", "-1"])
    rep = roundtrip(spec, ring="rational", order=17)
    assert rep.compared_order == 8
    assert rep.requested_order == 9
    assert not rep.complete
    assert rep.lam_discrepancy == 0
