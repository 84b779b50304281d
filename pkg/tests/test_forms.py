import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from edskit.forms import (
    CoframeMismatchError, CoframeSpace, DifferentialForm, ExteriorIdeal, FormError,
    NotCoordinateExactError, VectorField, contract, d, homotopy, in_ideal, lie_derivative,
    pullback, reduce_mod, wedge,
)
from edskit.noether import euclidean_frame
from strategies import forms, polynomials

x, y, z = sp.symbols("x y z")
COORD = CoframeSpace.coordinates([x, y, z])
FRAME = euclidean_frame(2)
V = FRAME.v

SPACES = {
    "coordinates": (COORD, polynomials([x, y, z], max_terms=3, max_deg=2)),
    "euclidean-frame": (FRAME.space, polynomials(V, max_terms=3, max_deg=2)),
}


def _random_form(name, degree):
    space, coeffs = SPACES[name]
    return forms(space, degree, coeffs)


def _random_field(name):
    space, coeffs = SPACES[name]
    return st.lists(coeffs, min_size=space.dim, max_size=space.dim).map(
        lambda cs: VectorField(space, {space.names[i]: c for i, c in enumerate(cs)}))


# -- construction ---------------------------------------------------------------

def test_structure_equations_checked_at_construction():
    assert FRAME.space.check_d_squared().is_zero
    with pytest.raises(FormError):
        # d e1 = e1∧e2 on the e2 component with d e2 = 0 violates d² = 0
        CoframeSpace(["e1", "e2", "e3"], structure={"e1": {("e2", "e3"): x}},
                     atoms={x: {"e1": 1}})


def test_no_zero_coefficients_stored_and_sorted_indices():
    f = COORD.form({("dx", "dy"): x, ("dy", "dx"): x, ("dz", "dx"): 1})
    assert all(c != 0 for c in f.terms.values())
    assert all(list(m) == sorted(m) for m in f.terms)
    assert f.coefficient("dx", "dz") == -1


def test_contraction_with_coframe_recovers_coefficients():
    f = COORD.form({("dx", "dy"): x * y, ("dy", "dz"): z})
    ex = VectorField(COORD, {"dx": 1})
    ey = VectorField(COORD, {"dy": 1})
    assert contract(ey, contract(ex, f)).terms[()] == x * y


def test_mismatched_coframes_rejected():
    other = CoframeSpace.coordinates([x, y])
    with pytest.raises(CoframeMismatchError):
        COORD.b("dx") + other.b("dx")


def test_frame_structure_equations():
    S = FRAME.space
    assert (d(S.basis("w0")) - (-S.b("w01", "w1") - S.b("w02", "w2"))).is_zero().is_zero
    assert (d(S.basis("w01")) - S.b("w02", "w12")).is_zero().is_zero
    assert (d(S.basis("w12")) - S.b("w01", "w02")).is_zero().is_zero


# -- random properties --------------------------------------------------------------

@pytest.mark.parametrize("name", list(SPACES))
@given(data=st.data())
@settings(max_examples=500)
def test_d_squared_vanishes(name, data):
    deg = data.draw(st.integers(0, 2))
    f = data.draw(_random_form(name, deg))
    assert d(d(f)).canonical().terms == {}


@pytest.mark.parametrize("name", list(SPACES))
@given(data=st.data())
@settings(max_examples=100)
def test_contraction_is_antiderivation(name, data):
    v = data.draw(_random_field(name))
    p = data.draw(st.integers(1, 2))
    a = data.draw(_random_form(name, p))
    b = data.draw(_random_form(name, 1))
    lhs = contract(v, wedge(a, b))
    rhs = wedge(contract(v, a), b) + (-1) ** p * wedge(a, contract(v, b))
    assert (lhs - rhs).canonical().terms == {}


@pytest.mark.parametrize("name", list(SPACES))
@given(data=st.data())
@settings(max_examples=100)
def test_lie_derivative_commutes_with_d(name, data):
    v = data.draw(_random_field(name))
    f = data.draw(_random_form(name, data.draw(st.integers(0, 1))))
    assert (lie_derivative(v, d(f)) - d(lie_derivative(v, f))).canonical().terms == {}


IDEAL = ExteriorIdeal(COORD, [COORD.b("dz") - y * COORD.b("dx"), COORD.b("dx", "dy") * x],
                      label="test")


@given(forms(COORD, 2, polynomials([x, y, z], max_terms=3, max_deg=2), max_terms=4))
@settings(max_examples=200)
def test_reduce_is_a_projection(f):
    r = reduce_mod(f, IDEAL)
    assert (reduce_mod(r, IDEAL) - r).canonical().terms == {}


def test_ideal_membership():
    S = COORD
    g = S.b("dz") - y * S.b("dx")
    member = wedge(g, S.b("dy")) * (x + 1)
    assert in_ideal(member, IDEAL).is_zero
    # with the 2-form generator x dx∧dy present, dy∧dz ≡ −(y/x)·x dx∧dy is a member
    assert in_ideal(S.b("dy", "dz"), IDEAL).is_zero
    assert in_ideal(S.b("dy", "dz"), ExteriorIdeal(S, [g])).is_nonzero


def test_differential_ideal_closure():
    S = COORD
    theta = S.b("dz") - y * S.b("dx")
    I = ExteriorIdeal(S, [theta], kind="differential")
    assert I.check_closure().is_zero
    assert in_ideal(S.b("dx", "dy"), I).is_zero          # dθ = −dy∧dx
    with pytest.raises(FormError):
        ExteriorIdeal(S, [theta], kind="bogus")


# -- pullback and homotopy ----------------------------------------------------------------

def test_pullback_commutes_with_d():
    u, w = sp.symbols("u w")
    src = CoframeSpace.coordinates([u, w])
    amap = {x: u * w, y: u + w ** 2, z: sp.sin(u)}
    f = COORD.form({("dx",): y * z, ("dz",): x ** 2})
    lhs = d(pullback(f, src, amap))
    rhs = pullback(d(f), src, amap)
    assert (lhs - rhs).canonical().terms == {}


def test_pullback_requires_expansion_on_frames():
    with pytest.raises(NotCoordinateExactError):
        pullback(FRAME.space.basis("w0"), COORD, {V[0]: x})


def test_homotopy_primitive():
    f = d(COORD.form({("dx",): y * z, ("dy",): x ** 2 * z}))
    h = homotopy(f)
    assert h is not None
    assert (d(h) - f).canonical().terms == {}
    with pytest.raises(FormError):
        homotopy(COORD.scalar(x))


def test_text_and_latex_output():
    f = COORD.form({("dx", "dy"): x})
    assert f.to_text() == "(x)*dx^dy"
    assert "\\wedge" in f.to_latex()
    assert f.to_json()


def test_sampled_membership_agrees_with_exact():
    S = COORD
    g = S.b("dz") - y * S.b("dx")
    I = ExteriorIdeal(S, [g], kind="differential")
    member = wedge(g, S.b("dy")) * (x + 1) + (z ** 2) * S.b("dx", "dy")
    assert I.contains_sampled(member).is_zero
    assert I.contains_sampled(S.b("dy", "dz")).is_zero       # ≡ −y dθ
    assert ExteriorIdeal(S, [g]).contains_sampled(S.b("dy", "dz")).is_nonzero
