"""Local inverse problem for Monge-Ampère systems and their pointwise type."""
from __future__ import annotations

import dataclasses
from typing import Any, Dict, List, Optional, Sequence

import sympy as sp

from .forms import (CoframeSpace, DifferentialForm, ExteriorIdeal, FormError, d, wedge)
from .jets import JetChart
from .scalar import TriState, Verdict, canonicalize, display_name, is_zero, to_text
from .symplectic import primitive_normalize

__all__ = ["InverseError", "MongeAmpereSystem", "InverseCertificate", "is_euler_lagrange",
           "PoissonResult", "poisson_el_test", "det_hessian_el_test", "ma_classify",
           "poisson_system", "integrate_gradient"]


class InverseError(Exception):
    pass


class MongeAmpereSystem:
    """Ideal ``{θ, dθ, Ψ}``; Ψ is stored primitive-normalized."""

    def __init__(self, space: CoframeSpace, theta: DifferentialForm, Psi: DifferentialForm,
                 normalize: bool = True, label: str = ""):
        self.space = space
        self.theta = theta
        self.n = Psi.degree
        self.Psi_raw = Psi
        self.label = label
        top = wedge(theta, d(theta) ** self.n)
        if not top.canonical().terms:
            raise InverseError("θ ∧ (dθ)^n = 0: not a contact form")
        self.Psi = primitive_normalize(Psi, theta) if normalize else Psi
        self.contact_ideal = ExteriorIdeal(space, [theta, d(theta)], label="I")
        if not self.contact_ideal.reduce(self.Psi).canonical().terms:
            raise InverseError("Ψ lies in the contact ideal")
        self.ideal = ExteriorIdeal(space, [theta, d(theta), self.Psi], label="{theta, dtheta, Psi}")


def poisson_system(f, chart: JetChart) -> MongeAmpereSystem:
    """``Ψ = Σ dp_i ∧ dx_(i) − f dx`` for ``Δz = f(x, z, ∇z)``."""
    S = chart.coframe(1)
    Psi = -sp.sympify(f) * chart.dx(S)
    for i in range(chart.n):
        Psi = Psi + wedge(S.d_atom(chart.pi(i)), chart.dx_hat(i, S))
    th = S.d_atom(chart.z[0])
    for i in range(chart.n):
        th = th - chart.pi(i) * S.d_atom(chart.x[i])
    return MongeAmpereSystem(S, th, Psi, label=f"Poisson f = {to_text(f)}")


@dataclasses.dataclass
class InverseCertificate:
    verdict: str                      # "locally Euler-Lagrange" | "not" | "unknown" | "... potential not in closed form"
    phi: Optional[DifferentialForm] = None
    phi_tilde: Optional[DifferentialForm] = None
    u: Optional[sp.Expr] = None
    closed_form: Optional[DifferentialForm] = None
    transcripts: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def affirmative(self) -> bool:
        return self.verdict.startswith("locally Euler-Lagrange")

    def reverify(self, ma: MongeAmpereSystem) -> TriState:
        Xi = wedge(ma.theta, ma.Psi)
        states = [(d(Xi) - wedge(self.phi, Xi)).is_zero(policy="exact")]
        if self.phi_tilde is not None:
            states.append(d(self.phi_tilde).is_zero(policy="exact"))
        if self.u is not None:
            states.append((d(ma.space.scalar(self.u)) - self.phi_tilde).is_zero(policy="exact"))
            states.append(d(sp.exp(-self.u) * Xi).is_zero(policy="exact"))
        return TriState.combine(states, "inverse")


def integrate_gradient(components: Dict[sp.Symbol, Any], variables: Sequence[sp.Symbol]):
    """Find ``u`` with ``∂u/∂v = components[v]`` by successive antiderivatives.

    Returns ``None`` when an antiderivative leaves closed form or the
    components are not a gradient.
    """
    u = sp.Integer(0)
    for v in variables:
        r = canonicalize(sp.sympify(components.get(v, 0)) - sp.diff(u, v))
        if r == 0:
            continue
        I = sp.integrate(r, v)
        if I.has(sp.Integral):
            return None
        u = u + I
    for v in variables:
        if canonicalize(sp.diff(u, v) - sp.sympify(components.get(v, 0))) != 0:
            if not is_zero(sp.diff(u, v) - sp.sympify(components.get(v, 0)),
                           on_missing="unknown").is_zero:
                return None
    return u


def _solve_phi(ma: MongeAmpereSystem):
    S = ma.space
    Xi = wedge(ma.theta, ma.Psi)
    dXi = d(Xi)
    th_ideal = ExteriorIdeal(S, [ma.theta], label="{theta}")
    idx = th_ideal.non_leads
    cs = [sp.Symbol(f"_phi{k}") for k in idx]
    phi = S.zero(1)
    for c, k in zip(cs, idx):
        phi = phi + c * S.basis(k)
    R = dXi - wedge(phi, Xi)
    eqs = [canonicalize(c) for c in R.terms.values()]
    eqs = [e for e in eqs if e != 0]
    if not eqs:
        return phi.xreplace({c: 0 for c in cs}), {"free": len(cs)}
    A, b = sp.linear_eq_to_matrix(eqs, cs)
    try:
        sol, params = A.gauss_jordan_solve(b)
    except ValueError:
        return None, {"system": "inconsistent", "equations": len(eqs)}
    free = list(params)
    sol = sol.xreplace({p: 0 for p in free})
    values = {c: canonicalize(v) for c, v in zip(cs, sol)}
    return phi.xreplace(values), {"equations": len(eqs), "free_parameters": len(free)}


def is_euler_lagrange(ma: MongeAmpereSystem) -> InverseCertificate:
    """Decide whether ``dΞ = φ ∧ Ξ`` (Ξ = θ∧Ψ) has a solution with closed corrected φ."""
    if ma.n < 2:
        raise InverseError("inverse criterion needs n ≥ 2")
    S = ma.space
    Xi = wedge(ma.theta, ma.Psi)
    if not d(Xi).canonical().terms:
        return InverseCertificate("locally Euler-Lagrange", S.zero(1), S.zero(1), sp.Integer(0),
                                  Xi, {"path": "Xi closed"})
    phi, tr = _solve_phi(ma)
    if phi is None:
        return InverseCertificate("not", transcripts=tr)
    chk = (d(Xi) - wedge(phi, Xi)).is_zero()
    tr["dXi=phi^Xi"] = chk.verdict.value
    if chk.is_nonzero:
        return InverseCertificate("not" if not tr.get("free_parameters") else "unknown", phi,
                                  transcripts=tr)
    if chk.is_unknown:
        return InverseCertificate("unknown", phi, transcripts=tr)
    # dφ ≡ β dθ  (mod θ)
    th_ideal = ExteriorIdeal(S, [ma.theta], label="{theta}")
    dphi = th_ideal.reduce(d(phi)).canonical()
    Th = th_ideal.reduce(d(ma.theta)).canonical()
    m0, c0 = sorted(Th.terms.items())[0]
    beta = canonicalize(dphi.terms.get(m0, 0) / c0)
    resid = (dphi - beta * Th).is_zero()
    tr["dphi=beta dtheta"] = resid.verdict.value
    if resid.is_nonzero:
        return InverseCertificate("not", phi, transcripts=tr)
    phit = (phi - beta * ma.theta).canonical()
    closed = d(phit).is_zero()
    tr["d phi_tilde"] = closed.verdict.value
    if closed.is_nonzero:
        return InverseCertificate("not", phi, phit, transcripts=tr)
    if closed.is_unknown or resid.is_unknown:
        return InverseCertificate("unknown", phi, phit, transcripts=tr)
    comps = {}
    for a in S.atoms:
        comps[a] = sp.Integer(0)
    # coefficients of φ̃ along the atom differentials (coordinate coframes)
    if not S.is_coordinate_exact():
        return InverseCertificate("locally Euler-Lagrange, potential not in closed form",
                                  phi, phit, transcripts=tr)
    for a in S.atoms:
        comps[a] = phit.terms.get((S.index["d" + a.name],), sp.Integer(0))
    u = integrate_gradient(comps, S.atoms)
    if u is None:
        return InverseCertificate("locally Euler-Lagrange, potential not in closed form",
                                  phi, phit, transcripts=tr)
    u = canonicalize(u)
    cf = (sp.exp(-u) * Xi)
    tr["d(exp(-u) Xi)"] = d(cf).is_zero().verdict.value
    return InverseCertificate("locally Euler-Lagrange", phi, phit, u, cf, tr)


# ---------------------------------------------------------------------------
# explicit criteria

@dataclasses.dataclass
class PoissonResult:
    passed: bool
    b: Optional[sp.Expr] = None
    a: Optional[sp.Expr] = None
    failed: Optional[str] = None
    transcript: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def verdict(self) -> TriState:
        return TriState(Verdict.ZERO if self.passed else Verdict.NONZERO, self.transcript)


def _vanishes(e) -> bool:
    e = canonicalize(e)
    if e == 0:
        return True
    return is_zero(e, on_missing="unknown").is_zero


def poisson_el_test(f, n: int = None, chart: JetChart = None) -> PoissonResult:
    """Is ``Δz = f`` Euler-Lagrange, i.e. ``f = ½ b_z |p|² + Σ b_{x^i} p_i + a``?"""
    if chart is None:
        chart = JetChart(n)
    n = chart.n
    f = sp.sympify(f)
    if chart.highest_order(f) > 1:
        raise InverseError("f must depend on (x, z, p) only")
    x, z = chart.x, chart.z[0]
    p = [chart.pi(i) for i in range(n)]
    tr: Dict[str, Any] = {}
    c = canonicalize(sp.diff(f, p[0], p[0]))
    for i in range(n):
        for j in range(n):
            h = sp.diff(f, p[i], p[j]) - (c if i == j else 0)
            if not _vanishes(h):
                return PoissonResult(False, failed="Hessian in p is not a scalar multiple of the identity",
                                     transcript={"entry": (i, j), "value": to_text(canonicalize(h))})
    if any(not _vanishes(sp.diff(c, q)) for q in p):
        return PoissonResult(False, failed="leading coefficient depends on p")
    e = [canonicalize(sp.diff(f, p[j]) - c * p[j]) for j in range(n)]
    for j in range(n):
        if any(not _vanishes(sp.diff(e[j], q)) for q in p):
            return PoissonResult(False, failed="linear coefficient depends on p")
    a = canonicalize(f - c * sum(q ** 2 for q in p) / 2 - sum(e[j] * p[j] for j in range(n)))
    for i in range(n):
        for j in range(i + 1, n):
            if not _vanishes(sp.diff(e[i], x[j]) - sp.diff(e[j], x[i])):
                return PoissonResult(False, failed="linear coefficients are not an x-gradient")
    b0 = integrate_gradient({x[i]: e[i] for i in range(n)}, x)
    if b0 is None:
        return PoissonResult(False, failed="gradient potential not in closed form", a=a,
                             transcript={"note": "conditions hold; potential not found"})
    r = canonicalize(c - sp.diff(b0, z))
    if any(not _vanishes(sp.diff(r, xi)) for xi in x):
        return PoissonResult(False, failed="(b_z − c) depends on x")
    h = sp.integrate(r, z)
    if h.has(sp.Integral):
        return PoissonResult(False, failed="z-antiderivative not in closed form")
    b = canonicalize(b0 + h)
    recon = canonicalize(sp.diff(b, z) * sum(q ** 2 for q in p) / 2
                         + sum(sp.diff(b, x[i]) * p[i] for i in range(n)) + a - f)
    tr["reconstruction"] = "Zero" if _vanishes(recon) else "NonZero"
    return PoissonResult(True, b, a, transcript=tr)


def det_hessian_el_test(g, n: int = None, chart: JetChart = None) -> TriState:
    """Separability ``g = g₀(x, z) g₁(p, z − Σ p_i x^i)`` via logarithmic derivatives."""
    if chart is None:
        chart = JetChart(n)
    n = chart.n
    g = sp.sympify(g)
    if canonicalize(g) == 0:
        raise InverseError("g vanishes identically")
    x, z = chart.x, chart.z[0]
    p = [chart.pi(i) for i in range(n)]
    h = sp.log(g)

    def V(i, e):
        return sp.diff(e, x[i]) + p[i] * sp.diff(e, z)

    def fail(reason):
        return TriState(Verdict.NONZERO, {"path": "exact", "failed": reason})

    a0 = canonicalize(sp.diff(V(0, h), p[0]))
    if any(not _vanishes(sp.diff(a0, q)) for q in p):
        return fail("∂_{p1}(V_1 log g) depends on p")
    a = []
    for i in range(n):
        ai = canonicalize(V(i, h) - p[i] * a0)
        if any(not _vanishes(sp.diff(ai, q)) for q in p):
            return fail(f"V_{i + 1} log g is not affine in p_{i + 1} with common slope")
        a.append(ai)
    for i in range(n):
        for j in range(i + 1, n):
            if not _vanishes(sp.diff(a[i], x[j]) - sp.diff(a[j], x[i])):
                return fail("x-curl condition fails")
        if not _vanishes(sp.diff(a[i], z) - sp.diff(a0, x[i])):
            return fail("z-compatibility condition fails")
    return TriState(Verdict.ZERO, {"path": "exact", "a0": to_text(a0),
                                   "a": [to_text(v) for v in a]})


def ma_classify(ma: MongeAmpereSystem, assumptions_sample: bool = True) -> Dict[str, Any]:
    """Type of an n=2 Monge-Ampère system from ``Ψ∧Ψ = μ (dθ)²`` mod θ."""
    if ma.n != 2:
        raise InverseError("pointwise classification is implemented for n = 2")
    S = ma.space
    th_ideal = ExteriorIdeal(S, [ma.theta], label="{theta}")
    psi = th_ideal.reduce(ma.Psi)
    Th = th_ideal.reduce(d(ma.theta))
    top = wedge(Th, Th).canonical()
    if len(top.terms) != 1:
        raise InverseError("(dθ)² mod θ is not a single monomial")
    (mono, c0), = top.terms.items()
    mu = canonicalize(wedge(psi, psi).terms.get(mono, 0) / c0)
    sign = None
    if mu == 0:
        sign = 0
    elif mu.is_positive:
        sign = 1
    elif mu.is_negative:
        sign = -1
    if sign is None:
        raise InverseError(f"sign of μ = {to_text(mu)} is undecidable under the assumptions")
    kind = {1: "elliptic", 0: "parabolic", -1: "hyperbolic"}[sign]
    return {"type": kind, "mu": mu, "mu_text": to_text(mu)}
