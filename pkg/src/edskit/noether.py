"""Contact symmetries, the Noether prescription, and conservation-law catalogs.

Sign convention: the law attached to a symmetry ``v`` is
``φ = −v⌟Λ₀ + (v⌟θ) β + γ`` with ``Λ₀ = L dx`` and ``β`` from
``Π = d(Λ₀ − θ∧β)``; every certificate records this.
"""
from __future__ import annotations

import dataclasses
import itertools
from typing import Any, Dict, List, Optional, Sequence

import sympy as sp

from .forms import (CoframeSpace, DifferentialForm, ExteriorIdeal, FormError, VectorField,
                    contract, d, homotopy, lie_derivative, wedge)
from .jets import JetChart
from .scalar import SamplingConfig, TriState, Verdict, canonicalize, is_zero, to_text
from .variational import (EulerLagrangeSystem, PoincareCartanForm, el_system, pc_form_classical)

__all__ = ["NoetherError", "PRESCRIPTION", "ContactSymmetry", "ConservationLaw",
           "contact_field_from_generating_function", "generating_function", "is_symmetry",
           "classify_symmetry", "noether", "verify_conservation", "euclidean_frame",
           "catalog_euclidean", "catalog_conformal", "conformal_pullback_check",
           "pohozaev_integrand", "catalog_wave", "wave_chart"]

PRESCRIPTION = "phi = -v _| Lambda0 + (v _| theta) beta + gamma"


class NoetherError(Exception):
    pass


@dataclasses.dataclass
class ContactSymmetry:
    v: VectorField
    g: sp.Expr
    flags: Dict[str, Any] = dataclasses.field(default_factory=dict)


@dataclasses.dataclass
class ConservationLaw:
    phi: DifferentialForm
    ideal: ExteriorIdeal
    provenance: str
    transcript: Optional[TriState] = None
    almost: Optional[DifferentialForm] = None      # dφ − almost ∈ ideal
    extra: Dict[str, Any] = dataclasses.field(default_factory=dict)
    policy: str = "exact-then-numeric"
    ranges: Optional[Dict] = None

    @property
    def verified(self) -> bool:
        return self.transcript is not None and self.transcript.is_zero


def _theta(chart: JetChart, S: CoframeSpace) -> DifferentialForm:
    th = S.d_atom(chart.z[0])
    for i in range(chart.n):
        th = th - chart.pi(i) * S.d_atom(chart.x[i])
    return th


def contact_field_from_generating_function(g, chart: JetChart) -> VectorField:
    """``v = (g − p·g_p)∂_z − g_{p_i}∂_{x^i} + (g_{x^i} + p_i g_z)∂_{p_i}``."""
    g = sp.sympify(g)
    if chart.s != 1:
        raise NoetherError("generating functions need one dependent variable")
    S = chart.coframe(1)
    z = chart.z[0]
    p = [chart.pi(i) for i in range(chart.n)]
    gp = [sp.diff(g, q) for q in p]
    comps = {z: g - sum(q * gq for q, gq in zip(p, gp))}
    for i, x in enumerate(chart.x):
        comps[x] = -gp[i]
        comps[p[i]] = sp.diff(g, x) + p[i] * sp.diff(g, z)
    return VectorField.from_coordinates(S, comps)


def generating_function(v: VectorField, chart: JetChart) -> sp.Expr:
    return canonicalize(contract(v, _theta(chart, v.space)).terms.get((), 0))


def _contact_ideal(chart: JetChart, S: CoframeSpace) -> ExteriorIdeal:
    th = _theta(chart, S)
    return ExteriorIdeal(S, [th, d(th)], label="I")


def is_symmetry(v: VectorField, target: str, pc: PoincareCartanForm = None,
                el: EulerLagrangeSystem = None, chart: JetChart = None) -> TriState:
    """``target`` ∈ {'contact', 'Lambda', 'Pi', 'E'}."""
    if pc is None and el is not None:
        pc = el.pc
    if chart is None:
        chart = pc.chart
    S = v.space
    th = _theta(chart, S)
    if target == "contact":
        I = ExteriorIdeal(S, [th], label="{theta}")
        return I.contains(lie_derivative(v, th))
    if target == "Lambda":
        return _contact_ideal(chart, S).contains(lie_derivative(v, pc.Lambda0))
    if target == "Pi":
        return lie_derivative(v, pc.Pi).is_zero()
    if target == "E":
        el = el or el_system(pc, check=False)
        return TriState.combine([el.ideal.contains(lie_derivative(v, gen))
                                 for gen in [th, d(th), pc.psi]], "E")
    raise NoetherError(f"unknown symmetry target {target!r}")


def classify_symmetry(v: VectorField, pc: PoincareCartanForm) -> ContactSymmetry:
    """Flags for the chain g_Λ ⊆ g_[Λ] ⊆ g_Π ⊆ g_E (g_[Λ] is computed as g_Π)."""
    el = el_system(pc, check=False)
    flags = {
        "contact": is_symmetry(v, "contact", pc).verdict.value,
        "g_Lambda": is_symmetry(v, "Lambda", pc).verdict.value,
        "g_Pi": is_symmetry(v, "Pi", pc).verdict.value,
        "g_E": is_symmetry(v, "E", pc, el).verdict.value,
    }
    flags["g_[Lambda]"] = flags["g_Pi"]
    return ContactSymmetry(v, generating_function(v, pc.chart), flags)


def noether(v: VectorField, pc: PoincareCartanForm, el: EulerLagrangeSystem = None,
            check_membership: bool = True, policy: str = "exact-then-numeric") -> ConservationLaw:
    """Conservation law of a symmetry of Π via the Noether prescription."""
    chart = pc.chart
    S = pc.space
    th = pc.theta[0]
    el = el or el_system(pc, check=False)
    if not lie_derivative(v, pc.Pi).canonical().is_zero(policy=policy).is_zero:
        raise NoetherError("vector field does not preserve Π")
    g = contract(v, th).terms.get((), sp.Integer(0))
    phi = -contract(v, pc.Lambda0) + g * pc.beta
    I = _contact_ideal(chart, S)
    LvL = I.reduce(lie_derivative(v, pc.Lambda0)).canonical()
    extra: Dict[str, Any] = {"prescription": PRESCRIPTION}
    gamma_found = True
    if LvL.terms:
        gamma = homotopy(lie_derivative(v, pc.Lambda).canonical())
        if gamma is None:
            gamma_found = False
            extra["gamma"] = "not found in the expression class"
        else:
            phi = phi + gamma
            extra["gamma"] = gamma.to_text()
    else:
        extra["gamma"] = "0 (v preserves Lambda0 modulo the contact ideal)"
    phi = phi.canonical()
    law = ConservationLaw(phi, el.ideal, "noether", extra=extra, policy=policy)
    if not gamma_found:
        law.transcript = TriState(Verdict.UNKNOWN, {"reason": "gamma not in closed form"})
    elif check_membership:
        law.transcript = verify_conservation(law)
    return law


def verify_conservation(law: ConservationLaw) -> TriState:
    dphi = d(law.phi)
    if law.almost is not None:
        dphi = dphi - law.almost
    if law.policy == "numeric":
        return law.ideal.contains_sampled(dphi, ranges=law.ranges)
    return law.ideal.contains(dphi, policy=law.policy, ranges=law.ranges)


# ---------------------------------------------------------------------------
# Euclidean frame bundle of E^{n+1}

def _skew(a: int, b: int):
    """(name, sign) for ω^a_b, or None on the diagonal."""
    if a == b:
        return None
    if a < b:
        return f"w{a}{b}", 1
    return f"w{b}{a}", -1


class euclidean_frame:
    """Orthonormal frame bundle coframe with translation/rotation/position atoms.

    Basis ``w0 … wn`` (``θ = w0``), ``w{a}{b}`` (a < b) with
    ``dω^a = −ω^a_c∧ω^c``, ``dω^a_b = −ω^a_c∧ω^c_b``.  Atoms: ``v^a = ⟨x, e_a⟩``,
    ``A^a = ⟨w, e_a⟩`` (fixed vector w), ``S_ab = ⟨R e_a, e_b⟩`` (fixed skew R).
    """

    def __init__(self, n: int = 2, H=None):
        self.n = n
        N = n + 1
        self.N = N
        names = [f"w{a}" for a in range(N)] + [f"w{a}{b}" for a in range(N) for b in range(a + 1, N)]
        self.v = [sp.Symbol(f"v{a}") for a in range(N)]
        self.A = [sp.Symbol(f"A{a}") for a in range(N)]
        self.Sk = {(a, b): sp.Symbol(f"S{a}{b}") for a in range(N) for b in range(a + 1, N)}

        def conn(a, b):
            s = _skew(a, b)
            return None if s is None else s

        structure = {}
        for a in range(N):
            terms = {}
            for c in range(N):
                s = conn(a, c)
                if s:
                    nm, sg = s
                    terms[(nm, f"w{c}")] = terms.get((nm, f"w{c}"), 0) - sg
            structure[f"w{a}"] = terms
        for a in range(N):
            for b in range(a + 1, N):
                terms = {}
                for c in range(N):
                    s1, s2 = conn(a, c), conn(c, b)
                    if s1 and s2:
                        key = (s1[0], s2[0])
                        terms[key] = terms.get(key, 0) - s1[1] * s2[1]
                structure[f"w{a}{b}"] = terms
        atoms = {}
        for a in range(N):
            spec = {f"w{a}": 1}
            specA = {}
            for b in range(N):
                s = conn(a, b)
                if s:
                    nm, sg = s
                    spec[nm] = spec.get(nm, 0) - sg * self.v[b]
                    specA[nm] = specA.get(nm, 0) - sg * self.A[b]
            atoms[self.v[a]] = spec
            atoms[self.A[a]] = specA
        for (a, b), sym in self.Sk.items():
            spec = {}
            for c in range(N):
                s1 = conn(c, a)
                if s1:
                    spec[s1[0]] = spec.get(s1[0], 0) + s1[1] * self.S(c, b)
                s2 = conn(c, b)
                if s2:
                    spec[s2[0]] = spec.get(s2[0], 0) + s2[1] * self.S(a, c)
            atoms[sym] = spec
        self.space = CoframeSpace(names, atoms=atoms, structure=structure, label=f"F(E^{N})")
        S = self.space
        self.theta = S.basis("w0")
        self.omega = [S.basis(f"w{i}") for i in range(1, N)]
        self.pi = [S.basis(f"w0{i}") for i in range(1, N)]
        self.Lambda = S.b(*[f"w{i}" for i in range(1, N)])
        self.Omega = S.b(*[f"w{a}" for a in range(N)])

    def S(self, a: int, b: int):
        if a == b:
            return sp.Integer(0)
        if a < b:
            return self.Sk[(a, b)]
        return -self.Sk[(b, a)]

    def K(self, a: int):
        return sum(self.S(a, b) * self.v[b] for b in range(self.N))

    def dual(self, name: str) -> VectorField:
        return VectorField(self.space, {name: 1})

    def omega_hat(self, i: int) -> DifferentialForm:
        """ω_(i) = e_i ⌟ (ω^1∧…∧ω^n), i = 1..n."""
        return contract(self.dual(f"w{i}"), self.Lambda)

    def field(self, omega_values: Dict[int, Any], conn_values: Dict = None) -> VectorField:
        comps = {f"w{a}": c for a, c in omega_values.items()}
        for (a, b), c in (conn_values or {}).items():
            comps[f"w{a}{b}"] = c
        return VectorField(self.space, comps)

    def position_field(self) -> VectorField:
        return self.field({a: self.v[a] for a in range(self.N)})

    def translation_field(self) -> VectorField:
        return self.field({a: self.A[a] for a in range(self.N)})

    def rotation_field(self) -> VectorField:
        return self.field({a: self.K(a) for a in range(self.N)},
                          {(a, b): self.S(a, b) for a in range(self.N) for b in range(a + 1, self.N)})

    def system(self, Lam: DifferentialForm, label: str):
        Pi = d(Lam).canonical()
        I0 = ExteriorIdeal(self.space, [self.theta], label="{theta}")
        Psi = I0.reduce(contract(self.dual("w0"), Pi)).canonical()
        ideal = ExteriorIdeal(self.space, [self.theta, d(self.theta), Psi], label=label)
        return Pi, Psi, ideal


def catalog_euclidean(kind: str = "minimal", mode: str = "translation", n: int = 2,
                      H=None, frame: euclidean_frame = None) -> ConservationLaw:
    """Frame-level conservation laws for minimal / constant-mean-curvature hypersurfaces."""
    F = frame or euclidean_frame(n)
    n = F.n
    S = F.space
    if kind == "minimal":
        Pi, Psi, ideal = F.system(F.Lambda, "E_minimal")
        if mode == "translation":
            phi = sum((F.A[i] * F.omega_hat(i) for i in range(1, n + 1)), S.zero(n - 1))
            law = ConservationLaw(phi, ideal, "euclidean/minimal/translation")
        elif mode == "rotation":
            phi = sum((F.K(i) * F.omega_hat(i) for i in range(1, n + 1)), S.zero(n - 1))
            law = ConservationLaw(phi, ideal, "euclidean/minimal/rotation")
        elif mode == "dilation":
            phi = sum((F.v[i] * F.omega_hat(i) for i in range(1, n + 1)), S.zero(n - 1))
            law = ConservationLaw(phi, ideal, "euclidean/minimal/dilation", almost=n * F.Lambda)
            x = F.position_field()
            law.extra["L_x Lambda - n Lambda"] = (lie_derivative(x, F.Lambda) - n * F.Lambda).is_zero().verdict.value
        else:
            raise NoetherError(f"unknown mode {mode!r}")
        law.extra["dPi"] = d(Pi).is_zero().verdict.value
        law.extra["Pi"] = Pi.to_text()
    elif kind == "cmc":
        Hs = sp.Symbol("H") if H is None else sp.sympify(H)
        x = F.position_field()
        Lam = (F.Lambda + (Hs / (n + 1)) * contract(x, F.Omega)).canonical()
        Pi, Psi, ideal = F.system(Lam, "E_cmc")
        if mode == "translation":
            v = F.translation_field()
            phi = -contract(v, F.Lambda) + (Hs / n) * contract(x, contract(v, F.Omega))
        elif mode == "rotation":
            v = F.rotation_field()
            phi = -contract(v, Lam)
        else:
            raise NoetherError(f"unknown mode {mode!r} for cmc")
        law = ConservationLaw(phi.canonical(), ideal, f"euclidean/cmc/{mode}")
        law.extra["H"] = to_text(Hs)
        law.extra["Psi"] = Psi.to_text()
    else:
        raise NoetherError(f"unknown kind {kind!r}")
    law.transcript = verify_conservation(law)
    return law


# ---------------------------------------------------------------------------
# conformally invariant Poisson equation Δu = C u^{(n+2)/(n−2)}

def _conformal_chart(n: int) -> JetChart:
    return JetChart(n, 1, 1, z_names=["u"], p_prefix="q", z_assumptions={"positive": True})


def _conformal_system(n: int, C):
    ch = _conformal_chart(n)
    S = ch.coframe(1)
    u = ch.z[0]
    th = _theta(ch, S)
    Psi = C * u ** sp.Rational(n + 2, n - 2) * ch.dx(S)
    for i in range(n):
        Psi = Psi - wedge(S.d_atom(ch.pi(i)), ch.dx_hat(i, S))
    ideal = ExteriorIdeal(S, [th, d(th), Psi], label="E_conformal")
    return ch, S, th, Psi, ideal


def catalog_conformal(n: int = 3, C=None, mode: str = "dilation", w=None, a=None, b=None,
                      policy: str = "numeric", config: SamplingConfig = None) -> ConservationLaw:
    """First-order conformal conservation laws φ_g of ``Δu = C u^{(n+2)/(n−2)}``."""
    if n < 3:
        raise NoetherError("conformal catalog needs n ≥ 3")
    C = sp.Symbol("C") if C is None else sp.sympify(C)
    ch, S, th, Psi, ideal = _conformal_system(n, C)
    u = ch.z[0]
    x = ch.x
    q = [ch.pi(i) for i in range(n)]
    c1 = sp.Rational(2, n - 2)
    c2 = sp.Rational(4, n - 2)
    cC = 2 * C / n
    pw = u ** sp.Rational(2 * n, n - 2)
    q2 = sum(qi ** 2 for qi in q)
    E0 = c1 * q2 + cC * pw
    coeffs = []
    if mode == "translation":
        w = w or [sp.Symbol(f"w{i + 1}") for i in range(n)]
        qw = sum(q[j] * w[j] for j in range(n))
        coeffs = [E0 * w[i] - c2 * q[i] * qw for i in range(n)]
    elif mode == "rotation":
        if a is None:
            a = sp.zeros(n, n)
            for i in range(n):
                for j in range(i + 1, n):
                    s_ = sp.Symbol(f"a{i + 1}{j + 1}")
                    a[i, j], a[j, i] = s_, -s_
        ax = [sum(a[i, j] * x[j] for j in range(n)) for i in range(n)]
        coeffs = [E0 * ax[i] - c2 * q[i] * sum(q[k] * ax[k] for k in range(n))
                  + c1 * u * sum(q[j] * a[j, i] for j in range(n)) for i in range(n)]
    elif mode == "dilation":
        qx = sum(q[j] * x[j] for j in range(n))
        coeffs = [E0 * x[i] - c2 * q[i] * qx - 2 * u * q[i] for i in range(n)]
    elif mode == "inversion":
        b = b or [sp.Symbol(f"b{i + 1}") for i in range(n)]
        bx = sum(b[k] * x[k] for k in range(n))
        x2 = sum(xi ** 2 for xi in x)
        Y = [bx * x[j] - b[j] * x2 / 2 for j in range(n)]
        coeffs = []
        for i in range(n):
            t = sum(((E0 if i == j else 0) - c2 * q[i] * q[j]) * Y[j] for j in range(n))
            coeffs.append(t - 2 * u * bx * q[i] + u ** 2 * b[i])
    else:
        raise NoetherError(f"unknown mode {mode!r}")
    phi = sum((coeffs[i] * ch.dx_hat(i, S) for i in range(n)), S.zero(n - 1))
    law = ConservationLaw(phi, ideal, f"conformal/{mode}", policy=policy)
    if policy == "numeric":
        law.transcript = ideal.contains_sampled(d(phi), config=config)
    else:
        law.transcript = ideal.contains(d(phi), policy=policy, config=config)
    law.extra["exact"] = ideal.contains(d(phi), policy="exact").verdict.value
    law.extra["C"] = to_text(C)
    return law


def pohozaev_integrand(n: int = 3, C=None):
    """``r(2/(n−2)|∇u|² + (2C/n)u^{2n/(n−2)} − 4/(n−2)⟨∇u,ν⟩²) − 2u⟨∇u,ν⟩`` on a sphere."""
    C = sp.Symbol("C") if C is None else sp.sympify(C)
    r, u, gn, g2 = sp.symbols("r u du_dnu gradu2")
    return r * (sp.Rational(2, n - 2) * g2 + 2 * C / n * u ** sp.Rational(2 * n, n - 2)
                - sp.Rational(4, n - 2) * gn ** 2) - 2 * u * gn


def conformal_pullback_check(n: int = 3, C=None):
    """Pull the Möbius-frame generator back to 1-jets and restrict to a graph.

    Returns (restricted form, expected form, TriState of their difference).
    """
    C = sp.Symbol("C") if C is None else sp.sympify(C)
    lam = sp.Rational(n - 2, 2)
    k = 1 / (2 * lam)
    names = ["rho"] + [f"om{i}" for i in range(1, n + 1)] + [f"be{i}" for i in range(1, n + 1)] + \
        [f"al{i}{j}" for i in range(1, n + 1) for j in range(i + 1, n + 1)]

    def al(i, j):
        if i == j:
            return None
        return (f"al{i}{j}", 1) if i < j else (f"al{j}{i}", -1)

    structure = {"rho": {(f"be{i}", f"om{i}"): -sp.Rational(1, 2) for i in range(1, n + 1)}}
    for i in range(1, n + 1):
        t = {("rho", f"om{i}"): 2}
        for j in range(1, n + 1):
            s = al(i, j)
            if s:
                t[(s[0], f"om{j}")] = t.get((s[0], f"om{j}"), 0) - s[1]
        structure[f"om{i}"] = t
        t = {("rho", f"be{i}"): -2}
        for j in range(1, n + 1):
            s = al(j, i)
            if s:
                t[(f"be{j}", s[0])] = t.get((f"be{j}", s[0]), 0) - s[1]
        structure[f"be{i}"] = t
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            t = {}
            for m in range(1, n + 1):
                s1, s2 = al(i, m), al(m, j)
                if s1 and s2:
                    key = (s1[0], s2[0])
                    t[key] = t.get(key, 0) - s1[1] * s2[1]
            t[(f"be{i}", f"om{j}")] = t.get((f"be{i}", f"om{j}"), 0) - 1
            t[(f"be{j}", f"om{i}")] = t.get((f"be{j}", f"om{i}"), 0) + 1
            structure[f"al{i}{j}"] = t
    P = CoframeSpace(names, structure=structure, label="Moebius frame")
    om_vol = P.b(*[f"om{i}" for i in range(1, n + 1)])
    Psi = -(2 * C / (n - 2)) * om_vol
    for i in range(1, n + 1):
        Psi = Psi + wedge(P.basis(f"be{i}"), contract(VectorField(P, {f"om{i}": 1}), om_vol))
    ch = _conformal_chart(n)
    ch = JetChart(n, 1, 1, z_names=["u"], p_prefix="p", z_assumptions={"positive": True})
    S = ch.coframe(1)
    u = ch.z[0]
    p = [ch.pi(i) for i in range(n)]
    dx = [S.d_atom(xi) for xi in ch.x]
    p2 = sum(pi_ ** 2 for pi_ in p)
    images = {"rho": k / u * S.d_atom(u) - sum((p[i] / 2 * dx[i] for i in range(n)), S.zero(1))}
    for i in range(n):
        images[f"om{i + 1}"] = u ** (2 * k) * dx[i]
        bi = S.d_atom(p[i]) - sum((p[i] * p[j] * dx[j] for j in range(n)), S.zero(1)) + p2 / 2 * dx[i]
        images[f"be{i + 1}"] = u ** (-2 * k) * bi
    from .forms import pullback
    sigma_Psi = pullback(Psi, S, basis_images={k_: v for k_, v in images.items() if not k_.startswith("al")})
    U = sp.Function("U", positive=True)(*ch.x)
    amap = {u: U}
    for i in range(n):
        amap[p[i]] = sp.diff(U, ch.x[i]) / (lam * U)
    base = ch.base_coframe()
    restricted = pullback(sigma_Psi, base, atom_map=amap).canonical()
    lapU = sum(sp.diff(U, xi, 2) for xi in ch.x)
    expected = (2 * U / (n - 2)) * (lapU - C * U ** sp.Rational(n + 2, n - 2)) * ch.dx(base)
    st = (restricted - expected).is_zero(policy="exact")
    return restricted, expected, st, P


# ---------------------------------------------------------------------------
# semilinear wave equation □z = f(z)

def wave_chart(n: int = 2) -> JetChart:
    """Lorentzian chart (t, y1..yn) with p0 = z_t."""
    return JetChart(n + 1, 1, 1, x_names=["t"] + [f"y{i}" for i in range(1, n + 1)],
                    labels=[str(i) for i in range(n + 1)], signature=[-1] + [1] * n)


def catalog_wave(n: int = 2, mode: str = "time-translation", F=None, C=None) -> ConservationLaw:
    """Energy, dilation and inversion laws for ``L = ½(−p₀² + Σp_i²) + F(z)``."""
    ch = wave_chart(n)
    z = ch.z[0]
    p = [ch.pi(a) for a in range(n + 1)]
    if mode == "time-translation":
        if F is None:
            from .scalar import function_symbol
            F = function_symbol("F")(z)
        L = (-p[0] ** 2 + sum(q ** 2 for q in p[1:])) / 2 + F
        pc = pc_form_classical(L, ch)
        el = el_system(pc, check=False)
        v = VectorField.from_coordinates(pc.space, {ch.x[0]: 1})
        law = noether(v, pc, el)
        e = (p[0] ** 2 + sum(q ** 2 for q in p[1:])) / 2 + F
        law.provenance = "wave/time-translation"
        law.extra["energy_density"] = to_text(canonicalize(e))
        law.extra["pc"] = pc
        return law
    if n < 2:
        raise NoetherError("conformal wave laws need n ≥ 2")
    C = sp.Rational(n - 1, 2 * (n + 1)) if C is None else sp.sympify(C)
    if F is not None:
        Fs = sp.sympify(F)
        if canonicalize(Fs - C * z ** sp.Rational(2 * (n + 1), n - 1)) != 0:
            raise NoetherError("conformal modes require F(z) = C z^{2(n+1)/(n−1)}")
    F = C * z ** sp.Rational(2 * (n + 1), n - 1)
    L = (-p[0] ** 2 + sum(q ** 2 for q in p[1:])) / 2 + F
    pc = pc_form_classical(L, ch)
    el = el_system(pc, check=False)
    S = pc.space
    t, y = ch.x[0], ch.x[1:]
    half = sp.Rational(1, 2)
    dy = S.scalar(1)
    for yi in y:
        dy = dy ^ S.d_atom(yi)
    if mode == "dilation":
        comps = {z: -sp.Rational(n - 1, 2) * z, t: t}
        for yi in y:
            comps[yi] = yi
        for a in range(n + 1):
            comps[p[a]] = -sp.Rational(n + 1, 2) * p[a]
        V = VectorField.from_coordinates(S, comps)
        phi = contract(V, pc.Lambda)
    elif mode == "inversion":
        r2 = sum(yi ** 2 for yi in y)
        comps = {z: sp.Rational(n - 1, 2) * t * z, t: -half * (t ** 2 + r2)}
        for yi in y:
            comps[yi] = -t * yi
        comps[p[0]] = (sp.Rational(n - 1, 2) * z + sum(p[i + 1] * y[i] for i in range(n))
                       + sp.Rational(n + 1, 2) * t * p[0])
        for i in range(n):
            comps[p[i + 1]] = p[0] * y[i] + sp.Rational(n + 1, 2) * t * p[i + 1]
        V = VectorField.from_coordinates(S, comps)
        phi = -contract(V, pc.Lambda) - sp.Rational(n - 1, 4) * z ** 2 * dy
    else:
        raise NoetherError(f"unknown mode {mode!r}")
    law = ConservationLaw(phi.canonical(), el.ideal, f"wave/{mode}")
    law.extra["field"] = V
    law.extra["Pi-symmetry"] = lie_derivative(V, pc.Pi).is_zero().verdict.value
    law.extra["pc"] = pc
    law.transcript = verify_conservation(law)
    return law
