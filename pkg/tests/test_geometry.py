import math
import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from edskit.forms import wedge
from edskit.geometry import (
    ORBIT_REPRESENTATIVES, GeometryError, KOneProlongedFrame, WeingartenCoefficients,
    backlund_compatibility, backlund_sg, export_mesh, k1_conserved_forms, k1_ode, parse_obj,
    plane, pseudosphere, pseudosphere_from_line, round_sphere, sg_residual, sine_gordon_link,
    surface_curvature_numeric, weingarten_action, weingarten_orbit,
)
from edskit.scalar import is_zero

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


# -- Weingarten ---------------------------------------------------------------------

def test_zero_triple_rejected():
    with pytest.raises(GeometryError):
        WeingartenCoefficients(0, 0, 0)


def test_cmc_parallel_surface_case():
    A = sp.Symbol("A", nonzero=True)
    out = weingarten_action((0, 1, A), phi=1 / A)
    assert out.triple == (-1 / A, 0, A)


def test_flow_identities():
    a, b, c, t1, t2, s = sp.symbols("a b c t1 t2 s")
    assert weingarten_action((a, b, c), phi=0).triple == (a, b, c)
    assert weingarten_action((1, 0, 0), psi=s).triple == (1, 0, 0)
    two = weingarten_action(weingarten_action((a, b, c), phi=t1), phi=t2)
    one = weingarten_action((a, b, c), phi=t1 + t2)
    assert all(sp.expand(u - v) == 0 for u, v in zip(two.triple, one.triple))


@given(rationals, rationals, rationals)
@settings(max_examples=200)
def test_orbit_flows_reach_representative(a, b, c):
    if a == b == c == 0:
        return
    rep, flows = weingarten_orbit((a, b, c), with_flows=True)
    assert rep in ORBIT_REPRESENTATIVES
    out = weingarten_action((sp.Rational(a.numerator, a.denominator),
                             sp.Rational(b.numerator, b.denominator),
                             sp.Rational(c.numerator, c.denominator)),
                            phi=flows["phi"], psi=flows["psi"])
    assert out.projectively_equal(rep)


def test_orbit_examples():
    assert weingarten_orbit((1, 0, -1)) == (1, 0, -1)
    assert weingarten_orbit((0, 1, 0)) == (0, 1, 0)
    assert weingarten_orbit((1, 1, 1)) == (0, 0, 1)
    assert weingarten_orbit((1, 2, 1)) == (1, 0, -1)
    assert weingarten_orbit((5, 0, 3)) == (1, 0, 1)
    assert weingarten_orbit((2, 7, 0)) == (0, 1, 0)


# -- the K = −1 prolonged system ------------------------------------------------------

FRAME = KOneProlongedFrame()


def test_frame_structure_closes():
    assert FRAME.space.check_d_squared().is_zero


def test_decomposable_combinations():
    res = FRAME.check_decomposable()
    assert all(v.is_zero for v in res.values())
    for _, factored in FRAME.decomposable_pair():
        assert wedge(factored, factored).canonical().terms == {}


def test_k1_conserved_forms_exact():
    laws = k1_conserved_forms(FRAME)
    assert len(laws) == 2
    for law in laws:
        assert law.verified
        assert law.transcript.transcript.get("path") != "numeric"


@pytest.mark.parametrize("sign", [1, -1])
def test_k1_ode(sign):
    out = k1_ode(FRAME, sign)
    a = FRAME.a
    assert sp.simplify(out["ratio"] - a / (1 + a ** 2)) == 0
    assert out["matches"]


def test_sine_gordon_link():
    r = sine_gordon_link(FRAME)
    for key in ("frame_change_w1", "frame_change_w2", "first_fundamental_form",
                "second_fundamental_form", "I in z", "II in z", "sine_gordon"):
        assert r[key].is_zero, key
    assert r["residual_ratio"] == 2


# -- Bäcklund ------------------------------------------------------------------------------------

def test_first_backlund_step_closed_form():
    res = backlund_sg(seed=0, lam=1, c=0)
    x, y = res.x, res.y
    assert sp.simplify(res.u - 2 * sp.atan(sp.exp(x + y))) == 0
    assert res.verification.is_zero


def test_closed_form_with_constant():
    c = sp.Rational(1, 3)
    res = backlund_sg(seed=0, lam=1, c=c)
    assert is_zero(sg_residual(res.u)).is_zero


def test_sg_residual_rejects_non_solution():
    x, y = sp.symbols("x y", real=True)
    assert is_zero(sg_residual(x * y)).is_nonzero


def test_second_backlund_step_grid():
    res = backlund_sg(seed=2 * sp.atan(sp.exp(sp.Symbol("x", real=True) + sp.Symbol("y", real=True))),
                      lam=2, grid=41)
    assert res.residual_sup < 1e-6
    assert res.compatibility < 1e-6


def test_backlund_compatibility_symbolic():
    assert backlund_compatibility().is_zero
    assert backlund_compatibility(sp.Rational(3, 2)).is_zero


# -- surfaces -----------------------------------------------------------------------------------

def test_pseudosphere_from_line_matches():
    p = pseudosphere_from_line()
    assert p.extra["theta_bar_matches"].is_zero
    assert p.extra["integrable"].is_zero
    assert p.extra["leaf_ok"].is_zero
    assert all(t.is_zero for t in p.extra["matches_pseudosphere"])
    assert p.extra["expected_K"] == -1
    q = pseudosphere()
    assert all(sp.simplify(a - b) == 0 for a, b in zip(p.exprs, q.exprs))


def test_pseudosphere_from_line_other_tau_not_implemented():
    with pytest.raises(GeometryError):
        pseudosphere_from_line(tau=sp.pi / 3)


def test_curvatures_of_model_surfaces():
    rng = random.Random(5)
    ps = pseudosphere()
    samples = []
    while len(samples) < 10:
        v, w = rng.uniform(0, 2 * math.pi), rng.uniform(-2, 2)
        if not ps.is_singular(v, w):
            samples.append((v, w))
    for K, _ in surface_curvature_numeric(ps, samples):
        assert abs(K + 1) < 1e-8
    for K, _ in surface_curvature_numeric(round_sphere(2), [(0.7, 1.1), (2.0, 0.4)]):
        assert abs(K - 0.25) < 1e-8
    for K, H in surface_curvature_numeric(plane(), [(0.3, 0.2)]):
        assert abs(K) < 1e-8 and abs(H) < 1e-8


def test_pseudosphere_singular_locus_declared():
    ps = pseudosphere()
    assert ps.is_singular(1.0, 0.05)
    assert not ps.is_singular(1.0, 0.5)


def test_mesh_export_round_trip(tmp_path):
    path = tmp_path / "ps.obj"
    text = export_mesh(pseudosphere(), (10, 12), str(path))
    assert path.read_text() == text
    verts, faces = parse_obj(text)
    assert len(verts) == 120
    assert all(len(f) in (3, 4) for f in faces)
    assert all(1 <= i <= len(verts) for f in faces for i in f)


def _jacobian_rank(p, vals):
    J = sp.Matrix(p.exprs).jacobian(sp.Matrix(p.params))
    M = J.subs(dict(zip(p.params, vals))).evalf(30)
    return sp.Matrix(M).rank(iszerofunc=lambda e: abs(e) < 1e-20)


def test_pseudosphere_is_immersion_off_singular_locus():
    ps = pseudosphere()
    rng = random.Random(9)
    for _ in range(10):
        v, w = rng.uniform(0, 6.28), rng.choice([-1, 1]) * rng.uniform(0.1, 2)
        assert _jacobian_rank(ps, (v, w)) == 2
    assert _jacobian_rank(ps, (0.4, 0)) < 2
