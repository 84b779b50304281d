"""Shared helpers for the test-suite (random Lagrangians, frame comparisons)."""
import random

import sympy as sp

from edskit.forms import pullback, wedge
from edskit.jets import JetChart


def random_polynomial(rng: random.Random, symbols, terms=4, max_deg=2, coeff=3):
    out = sp.Integer(0)
    for _ in range(terms):
        m = sp.Integer(rng.randint(-coeff, coeff) or 1)
        for s in symbols:
            if rng.random() < 0.5:
                m *= s ** rng.randint(1, max_deg)
        out += m
    return out


def random_lagrangian(rng: random.Random, chart: JetChart):
    """Random polynomial first-order Lagrangian with a nondegenerate quadratic part."""
    p = [chart.pi(i) for i in range(chart.n)]
    base = sum(q ** 2 for q in p) / 2
    return base + random_polynomial(rng, list(chart.x) + [chart.z[0]] + p, terms=4, max_deg=2)


def to_adapted(f, chart: JetChart):
    """Rewrite a form on the coordinate coframe in the chart's adapted coframe."""
    return pullback(f, chart.adapted_coframe())


def flat_energy_pi(chart: JetChart):
    """−Σ θ^α ∧ dp^α_i ∧ dx_(i) on the adapted first-order coframe."""
    S = chart.adapted_coframe()
    out = S.zero(chart.n + 1)
    for a in range(chart.s):
        th = S.basis(chart.theta_name(a, ()))
        for i in range(chart.n):
            out = out - wedge(wedge(th, S.d_atom(chart.p(a, (i,)))), chart.dx_hat(i, S))
    return out
