"""Acceptance suite: one test per criterion, each with its tolerance and time limit.

Every test prints ``PASS``/``FAIL`` for its criterion; the session summary lists all
of them again (see ``conftest.py``).
"""
import contextlib
import itertools
import math
import random
import time
from fractions import Fraction

import mpmath
import sympy as sp

from edskit.cli import execute
from edskit.forms import CoframeSpace, DifferentialForm, d, wedge
from edskit.geometry import (
    ORBIT_REPRESENTATIVES, KOneProlongedFrame, WeingartenCoefficients, backlund_sg,
    k1_conserved_forms, k1_ode, pseudosphere_from_line, sg_residual,
    surface_curvature_numeric, weingarten_action, weingarten_orbit,
)
from edskit.gensym import euclidean_generators, sine_gordon_densities, solve_generalized_symmetries, span_rank
from edskit.inverse import MongeAmpereSystem, is_euler_lagrange, ma_classify, poisson_el_test, poisson_system
from edskit.jets import JetChart
from edskit.noether import catalog_conformal, catalog_euclidean, catalog_wave, conformal_pullback_check, euclidean_frame
from edskit.scalar import is_zero
from edskit.symplectic import SymplecticModel, lepage_decompose
from edskit.variational import betounes_form, pc_form_classical
from helpers import flat_energy_pi, random_lagrangian, random_polynomial, to_adapted

RESULTS = []


@contextlib.contextmanager
def criterion(number, title, limit):
    """Time the block, enforce ``limit`` seconds, and record PASS/FAIL."""
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d}: {title} ({elapsed:.2f}s / {limit}s)"
        RESULTS.append(line)
        print(line)


# 1 ------------------------------------------------------------------------------------

def test_c01_euler_lagrange_derivation():
    text = ("chart independent x1, x2, x3 dependent z order 1\nfunction F(1)\n"
            "lagrangian = 1/2*(p1^2 + p2^2 + p3^2) + F(z)\n")
    with criterion(1, "el on 1/2|p|^2 + F(z) gives Δz − F′(z) = 0", 1.0):
        code, cert, lines = execute(["el"], text=text)
        assert code == 0
        assert " ".join(cert["result"]["display"].split()) == "Δz − F′(z) = 0"


# 2 ------------------------------------------------------------------------------------

def test_c02_poincare_cartan_closed_and_normalized():
    with criterion(2, "dΠ = 0 and θ∧Π = 0 for 20 random L (n = 2, 3)", 30.0):
        rng = random.Random(2024)
        for k in range(20):
            ch = JetChart(2 + k % 2, 1, 1)
            pc = pc_form_classical(random_lagrangian(rng, ch), ch)
            assert d(pc.Pi).canonical().terms == {}
            assert wedge(pc.theta[0], pc.Pi).canonical().terms == {}


# 3 ------------------------------------------------------------------------------------

def _family_member(rng, ch):
    x, z = ch.x, ch.z[0]
    p = [ch.pi(i) for i in range(ch.n)]
    b = random_polynomial(rng, list(x) + [z], terms=3, max_deg=2)
    a = random_polynomial(rng, list(x) + [z], terms=3, max_deg=2)
    return (sp.diff(b, z) * sum(q ** 2 for q in p) / 2
            + sum(sp.diff(b, x[i]) * p[i] for i in range(ch.n)) + a)


def test_c03_inverse_problem():
    with criterion(3, "Poisson family: 10 members accepted, p1p2 and p1^3 rejected, both tests agree", 60.0):
        rng = random.Random(33)
        ch = JetChart(2, 1, 1)
        p1, p2 = ch.pi(0), ch.pi(1)
        cases = [(_family_member(rng, ch), True) for _ in range(10)] + [(p1 * p2, False), (p1 ** 3, False)]
        for f, member in cases:
            assert poisson_el_test(f, chart=ch).passed is member
            cert = is_euler_lagrange(poisson_system(f, ch))
            assert cert.affirmative is member
            if not member:
                assert cert.verdict == "not"


# 4 ------------------------------------------------------------------------------------

def test_c04_monge_ampere_trichotomy():
    with criterion(4, "wave hyperbolic, Laplace elliptic, K = −1 hyperbolic", 5.0):
        ch = JetChart(2, 1, 1)
        S = ch.coframe(1)
        wave = MongeAmpereSystem(S, ch.theta(), S.b("dp1", "dx2") + S.b("dp2", "dx1"))
        F = euclidean_frame(2)
        k1 = MongeAmpereSystem(F.space, F.theta, WeingartenCoefficients(1, 0, 1).psi(F))
        assert ma_classify(wave)["type"] == "hyperbolic"
        assert ma_classify(poisson_system(0, ch))["type"] == "elliptic"
        assert ma_classify(k1)["type"] == "hyperbolic"


# 5 ------------------------------------------------------------------------------------
# Independent oracle: a self-contained exterior algebra on index tuples and one dense
# exact solve for every component at once.

def _mono_wedge(a, b):
    if set(a) & set(b):
        return None, 0
    seq = list(a) + list(b)
    inv = sum(1 for i, j in itertools.combinations(range(len(seq)), 2) if seq[i] > seq[j])
    return tuple(sorted(seq)), (-1) ** inv


def _wedge(f, g):
    out = {}
    for ma, ca in f.items():
        for mb, cb in g.items():
            m, s = _mono_wedge(ma, mb)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return {m: c for m, c in out.items() if c != 0}


def _power(theta, k):
    out = {(): 1}
    for _ in range(k):
        out = _wedge(out, theta)
    return out


def _oracle_matrix(indices, theta, n, p):
    """Columns: coefficients of ξ_i (deg p − 2i); rows: Σ Θ^i ξ_i and Θ^{n−q+1} ξ_i."""
    blocks = [(i, p - 2 * i) for i in range(p // 2 + 1)]
    cols = [(i, m) for i, q in blocks for m in itertools.combinations(indices, q)]
    rows = [("sum", m) for m in itertools.combinations(indices, p)]
    for i, q in blocks:
        r = n - q + 1
        rows += [("prim", i, m) for m in itertools.combinations(indices, q + 2 * r)] if q + 2 * r <= 2 * n else []
    rpos = {r: k for k, r in enumerate(rows)}
    A = sp.zeros(len(rows), len(cols))
    for j, (i, m) in enumerate(cols):
        q = p - 2 * i
        for mm, c in _wedge(_power(theta, i), {m: 1}).items():
            A[rpos[("sum", mm)], j] += c
        r = n - q + 1
        if q + 2 * r <= 2 * n:
            for mm, c in _wedge(_power(theta, r), {m: 1}).items():
                A[rpos[("prim", i, mm)], j] += c
    return A, rows, cols


def test_c05_lepage_decomposition_matches_dense_solve():
    with criterion(5, "Lepage components reassemble and match a dense solve (n = 2, 3; 50 forms/degree)", 30.0):
        rng = random.Random(55)
        for n in (2, 3):
            xs, ps = sp.symbols(f"x1:{n + 1}"), sp.symbols(f"p1:{n + 1}")
            S = CoframeSpace.coordinates(list(xs) + list(ps))
            m = SymplecticModel(S, pairs=[(f"dp{i}", f"dx{i}") for i in range(1, n + 1)])
            idx = sorted(m.indices)
            theta = {}
            for i in range(1, n + 1):
                a, b = S._idx(f"dp{i}"), S._idx(f"dx{i}")
                key, sgn = _mono_wedge((a,), (b,))
                theta[key] = theta.get(key, 0) - sgn
            for p in range(n + 1):
                A, rows, cols = _oracle_matrix(idx, theta, n, p)
                assert A.rank() == A.shape[1]                     # unique decomposition
                P = (A.T * A).inv() * A.T
                for _ in range(50):
                    coef = {}
                    for mono in itertools.combinations(idx, p):
                        if rng.random() < 0.6:
                            c = sp.Integer(rng.randint(-6, 6))
                            if rng.random() < 0.2:
                                c += rng.randint(1, 3) * rng.choice(list(xs) + list(ps))
                            coef[mono] = c
                    f = DifferentialForm(S, coef, p)
                    dec = lepage_decompose(f, m)
                    assert (dec.reassemble() - f).canonical().terms == {}
                    rhs = sp.Matrix([coef.get(r[1], 0) if r[0] == "sum" else 0 for r in rows])
                    u = (P * rhs).applyfunc(sp.expand)
                    assert (A * u - rhs).applyfunc(sp.expand) == sp.zeros(len(rows), 1)
                    for j, (i, mono) in enumerate(cols):
                        got = dec.components[i].terms.get(mono, 0) if i < len(dec.components) else 0
                        assert sp.expand(got - u[j]) == 0
                    assert all(not c.terms for c in dec.components[p // 2 + 1:])


# 6 ------------------------------------------------------------------------------------

def test_c06_noether_wave_energy():
    text = ("chart independent t, y1, y2 dependent z labels 0, 1, 2 signature -1, 1, 1 order 1\n"
            "function G(1) derivative g\nlagrangian = 1/2*(-p0^2 + p1^2 + p2^2) + G(z)\nvector.t = 1\n")
    with criterion(6, "wave energy: dφ in the EL ideal exactly (F symbol and polynomial F)", 5.0):
        code, cert, _ = execute(["noether"], text=text)
        assert code == 0
        tr = cert["transcripts"]["membership"]
        assert tr["verdict"] == "Zero" and tr["transcript"]["path"] == "exact"
        law = catalog_wave(2, mode="time-translation", F=sp.Symbol("z") ** 4 - 3 * sp.Symbol("z"))
        assert law.verified and law.transcript.transcript["path"] == "exact"


# 7 ------------------------------------------------------------------------------------

def test_c07_minimal_surface_laws():
    with criterion(7, "minimal surface translation/rotation laws; dφ_dil − nΛ ≡ 0 mod the ideal", 10.0):
        for mode in ("translation", "rotation"):
            law = catalog_euclidean("minimal", mode)
            assert law.verified and law.transcript.transcript["path"] == "exact"
        dil = catalog_euclidean("minimal", "dilation")
        st = dil.ideal.contains(d(dil.phi) - dil.almost)
        assert st.is_zero and st.transcript["path"] == "exact"
        assert dil.extra["L_x Lambda - n Lambda"] == "Zero"


# 8 ------------------------------------------------------------------------------------

def test_c08_conformal_poisson():
    with criterion(8, "conformal Poisson n = 3: pullback identity and four sampled laws", 60.0):
        restricted, expected, st, _ = conformal_pullback_check(3)
        assert st.is_zero and st.transcript.get("path") == "exact"
        for mode in ("translation", "rotation", "dilation", "inversion"):
            law = catalog_conformal(3, mode=mode)
            tr = law.transcript.transcript
            assert law.transcript.is_zero
            assert tr["path"] == "numeric-membership"
            assert tr["config"]["samples"] == 32 and tr["config"]["dps"] == 50
            assert len(tr["points"]) == 32 and tr["max_relative"] < 1e-30


# 9 ------------------------------------------------------------------------------------

def test_c09_generalized_symmetries():
    with criterion(9, "Δz = z² (n = 3): classical basis with span equal to the Euclidean span; Δz = 0 larger", 300.0):
        ch = JetChart(3, 1, 4)
        p = sum(ch.pi(i, i) for i in range(3))
        non = solve_generalized_symmetries(p - ch.z[0] ** 2, ch, order=2, degree=2)
        lin = solve_generalized_symmetries(p, ch, order=2, degree=2)
        assert lin.dimension > non.dimension
        assert non.all_classical
        eu = euclidean_generators(ch)
        v = non.ansatz.variables
        r_eu, r_all = span_rank(eu, v), span_rank(eu + non.basis, v)
        assert r_eu == r_all == non.dimension, \
            f"Euclidean span rank {r_eu}, combined {r_all}, solution dimension {non.dimension}"


# 10 -----------------------------------------------------------------------------------

def test_c10_sine_gordon_densities():
    with criterion(10, "dψ1, dψ2 vanish exactly on z_st = ½ sin 2z", 5.0):
        psi1, psi2, report = sine_gordon_densities()
        for law in (psi1, psi2):
            assert law.verified and law.transcript.transcript.get("path") != "numeric"


# 11 -----------------------------------------------------------------------------------

def test_c11_k1_conserved_forms():
    with criterion(11, "K = −1 conserved forms exact; f′/f = a/(1+a²) re-derived", 10.0):
        F = KOneProlongedFrame()
        laws = k1_conserved_forms(F)
        assert len(laws) == 2
        assert all(law.verified and law.transcript.transcript.get("path") != "numeric" for law in laws)
        for sign in (1, -1):
            out = k1_ode(F, sign)
            assert out["matches"] and sp.simplify(out["ratio"] - F.a / (1 + F.a ** 2)) == 0


# 12 -----------------------------------------------------------------------------------

def test_c12_backlund():
    with criterion(12, "closed-form first step passes the residual test; 101x101 second step < 1e-6", 60.0):
        x, y = sp.symbols("x y", real=True)
        for c in (0, sp.Rational(1, 3), -2):
            res = backlund_sg(seed=0, lam=1, c=c)
            assert sp.simplify(res.u.subs({res.x: x, res.y: y}) - 2 * sp.atan(sp.exp(x + y + c))) == 0
            st = is_zero(sg_residual(2 * sp.atan(sp.exp(x + y + c))), policy="numeric")
            assert st.is_zero
        two = backlund_sg(seed=2 * sp.atan(sp.exp(x + y)), lam=2, grid=101)
        assert two.residual_sup < 1e-6
        assert two.verification.is_zero


# 13 -----------------------------------------------------------------------------------

def _oracle_curvature(ex, params, v0, w0):
    mpmath.mp.dps = 30
    X = sp.Matrix(ex)
    Xv, Xw = X.diff(params[0]), X.diff(params[1])
    Nraw = Xv.cross(Xw)
    subs = {params[0]: v0, params[1]: w0}
    ev = lambda e: sp.N(e.subs(subs), 30)
    E, Fm, G = ev(Xv.dot(Xv)), ev(Xv.dot(Xw)), ev(Xw.dot(Xw))
    nn = ev(Nraw.dot(Nraw))
    L = ev(X.diff(params[0], 2).dot(Nraw))
    M = ev(X.diff(params[0], params[1]).dot(Nraw))
    Nn = ev(X.diff(params[1], 2).dot(Nraw))
    return float((L * Nn - M ** 2) / nn / (E * G - Fm ** 2))


def test_c13_pseudosphere_chain():
    with criterion(13, "pseudosphere from the line: symbolic match and K = −1 ± 1e-8 at 100 samples", 30.0):
        r, tau = 1, sp.pi / 2
        out = pseudosphere_from_line(r=r, tau=tau)
        v, w = out.params
        oracle = (sp.sech(w) * sp.cos(v), -sp.sech(w) * sp.sin(v), w - sp.tanh(w))
        for a, b in zip(out.exprs, oracle):
            assert sp.simplify((a - b).rewrite(sp.exp)) == 0
        K_expected = float(-sp.sin(tau) ** 2 / r ** 2)
        rng = random.Random(13)
        samples = []
        while len(samples) < 100:
            vv, ww = rng.uniform(0, 2 * math.pi), rng.uniform(-3, 3)
            if abs(ww) >= 0.1:
                samples.append((vv, ww))
        for (K, _), (vv, ww) in zip(surface_curvature_numeric(out, samples), samples):
            assert abs(K - K_expected) < 1e-8
        for vv, ww in samples[:10]:
            assert abs(_oracle_curvature(oracle, (v, w), vv, ww) - K_expected) < 1e-8


# 14 -----------------------------------------------------------------------------------

def test_c14_betounes():
    with criterion(14, "admissible lifting: s = 1 classical, flat energy, 5 divergence perturbations", 60.0):
        rng = random.Random(14)
        ch = JetChart(2, 1, 1)
        for _ in range(3):
            L = random_lagrangian(rng, ch)
            assert (betounes_form(L, ch).Pi - to_adapted(pc_form_classical(L, ch).Pi, ch)).canonical().terms == {}
        ch2 = JetChart(2, 2, 1, z_names=["u", "v"])
        L0 = sum(ch2.p(a, (i,)) ** 2 for a in range(2) for i in range(2)) / 2
        base = betounes_form(L0, ch2).Pi
        assert (base - flat_energy_pi(ch2)).canonical().terms == {}
        low = list(ch2.x) + list(ch2.z)
        for _ in range(5):
            f = [random_polynomial(rng, low, terms=2, max_deg=2) for _ in range(2)]
            div = sum(ch2.total_derivative(i, f[i]) for i in range(2))
            assert (betounes_form(L0 + div, ch2).Pi - base).canonical().terms == {}


# 15 -----------------------------------------------------------------------------------

def test_c15_weingarten_orbits():
    with criterion(15, "200 rational triples land on the five representatives; φ_{1/A}(0,1,A) = (−1/A,0,A)", 5.0):
        rng = random.Random(15)
        seen = set()
        for _ in range(200):
            t = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(3)]
            if not any(t):
                t[2] = Fraction(1)
            rep = weingarten_orbit(tuple(sp.Rational(q.numerator, q.denominator) for q in t))
            assert rep in ORBIT_REPRESENTATIVES
            seen.add(rep)
        assert seen <= set(ORBIT_REPRESENTATIVES) and len(ORBIT_REPRESENTATIVES) == 5
        A = sp.Symbol("A", nonzero=True)
        assert weingarten_action((0, 1, A), phi=1 / A).triple == (-1 / A, 0, A)
