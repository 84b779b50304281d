import random

import pytest
import sympy as sp

from edskit.forms import ExteriorIdeal, d, wedge
from edskit.jets import JetChart, Section, restrict_to_section
from edskit.scalar import canonicalize, function_symbol
from edskit.variational import (
    VariationalError, betounes_form, check_stationary, el_display, el_equation,
    el_solved_display, el_system, pc_form_classical, symbol_matrix,
)
from helpers import flat_energy_pi, random_lagrangian, random_polynomial, to_adapted


@pytest.mark.parametrize("n", [2, 3])
def test_pi_closed_and_normalized_for_random_lagrangians(n):
    rng = random.Random(100 + n)
    ch = JetChart(n, 1, 1)
    for _ in range(10):
        pc = pc_form_classical(random_lagrangian(rng, ch), ch)
        assert d(pc.Pi).canonical().terms == {}
        assert wedge(pc.theta[0], pc.Pi).canonical().terms == {}
        assert pc.transcripts["Pi=theta^Psi"] == "Zero"


def test_lambda0_semibasic():
    ch = JetChart(2, 1, 1)
    pc = pc_form_classical(sum(ch.pi(i) ** 2 for i in range(2)) + ch.z[0], ch)
    names = {pc.space.names[i] for m in pc.Lambda0.terms for i in m}
    assert names <= {"dx1", "dx2"}


def test_classical_rejects_second_order():
    ch = JetChart(2, 1, 2)
    with pytest.raises(VariationalError):
        pc_form_classical(ch.pi(0, 0) * ch.z[0], ch)


def test_el_matches_restricted_psi_for_random_lagrangians():
    rng = random.Random(7)
    for k in range(20):
        n = 2 + k % 2
        ch = JetChart(n, 1, 2)
        ch1 = JetChart(n, 1, 1)
        L = random_lagrangian(rng, ch1)
        pc = pc_form_classical(L, ch1)
        zs = random_polynomial(rng, ch1.x, terms=3, max_deg=3)
        sec1 = Section(ch1, zs)
        r = restrict_to_section(pc.Psi[0], sec1)
        coef = r.terms.get(tuple(range(n)), 0)
        E = el_equation(L, ch1)
        assert canonicalize(coef - Section(ch, zs).evaluate(E)) == 0


def test_el_energy_display():
    ch = JetChart(3, 1, 1)
    F = function_symbol("F")
    L = sum(ch.pi(i) ** 2 for i in range(3)) / 2 + F(ch.z[0])
    E = el_equation(L, ch)
    assert el_display(E, ch) == "Δz − F′(z) = 0"
    assert el_solved_display(E, ch) == "Δz = F′(z)"


def test_stationary_section():
    ch = JetChart(2, 1, 1)
    x1, x2 = ch.x
    L = sum(ch.pi(i) ** 2 for i in range(2)) / 2
    el = el_system(pc_form_classical(L, ch))
    assert el.closure.is_zero
    assert check_stationary(Section(JetChart(2, 1, 2), x1 ** 2 - x2 ** 2), el).is_zero
    assert check_stationary(Section(JetChart(2, 1, 2), x1 ** 2 + x2 ** 2), el).is_nonzero


def test_symbol_matrix():
    ch = JetChart(2, 1, 1)
    L = ch.pi(0) ** 2 / 2 - ch.pi(1) ** 2 / 2
    assert symbol_matrix(L, ch) == sp.diag(1, -1)


def test_betounes_scalar_case_is_classical():
    rng = random.Random(3)
    ch = JetChart(2, 1, 1)
    for _ in range(3):
        L = random_lagrangian(rng, ch)
        b = betounes_form(L, ch)
        c = pc_form_classical(L, ch)
        assert (b.Pi - to_adapted(c.Pi, ch)).canonical().terms == {}


def test_betounes_flat_energy():
    ch = JetChart(2, 2, 1, z_names=["u", "v"])
    L = sum(ch.p(a, (i,)) ** 2 for a in range(2) for i in range(2)) / 2
    b = betounes_form(L, ch)
    assert b.transcripts["dPi"] == "Zero"
    assert b.transcripts["symmetric"] == "Zero"
    assert (b.Pi - flat_energy_pi(ch)).canonical().terms == {}


def test_betounes_divergence_insensitive():
    rng = random.Random(11)
    ch = JetChart(2, 2, 1, z_names=["u", "v"])
    L = sum(ch.p(a, (i,)) ** 2 for a in range(2) for i in range(2)) / 2 + ch.p(0, (0,)) * ch.z[1]
    base = betounes_form(L, ch).Pi
    low = list(ch.x) + list(ch.z)
    for _ in range(3):
        f = [random_polynomial(rng, low, terms=2, max_deg=2) for _ in range(2)]
        div = sum(ch.total_derivative(i, f[i]) for i in range(2))
        assert (betounes_form(L + div, ch).Pi - base).canonical().terms == {}


def test_betounes_guard():
    ch = JetChart(4, 4, 1, z_names=list("abcd"))
    with pytest.raises(VariationalError):
        betounes_form(ch.z[0], ch)
