"""Poincaré-Cartan forms, Euler-Lagrange systems and the Betounes lifting."""
from __future__ import annotations

import dataclasses
import itertools
from typing import Any, Dict, List, Optional, Sequence

import sympy as sp

from .forms import (CoframeSpace, DifferentialForm, ExteriorIdeal, FormError, VectorField,
                    contract, d, wedge)
from .jets import JetChart, Section, restrict_to_section
from .scalar import TriState, Verdict, canonicalize, display_name, is_zero, to_text

__all__ = ["VariationalError", "Lagrangian", "PoincareCartanForm", "EulerLagrangeSystem",
           "pc_form_classical", "el_equation", "el_equations", "el_system", "admissible_lift",
           "betounes_form", "check_stationary", "el_display", "el_solved_display",
           "symbol_matrix", "symmetrized_symbol"]


class VariationalError(Exception):
    pass


@dataclasses.dataclass
class Lagrangian:
    """Classical Lagrangian ``Λ₀ = L dx`` on a first-order jet chart."""

    L: sp.Expr
    chart: JetChart

    def __post_init__(self):
        self.L = sp.sympify(self.L)
        if self.chart.highest_order(self.L) > 1:
            raise VariationalError("Lagrangian depends on coordinates of order > 1")


@dataclasses.dataclass
class PoincareCartanForm:
    chart: JetChart
    space: CoframeSpace
    L: sp.Expr
    Lambda0: DifferentialForm
    Lambda: DifferentialForm
    Pi: DifferentialForm
    theta: List[DifferentialForm]
    Psi: List[DifferentialForm]
    beta: Optional[DifferentialForm] = None
    transcripts: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def psi(self) -> DifferentialForm:
        return self.Psi[0]


@dataclasses.dataclass
class EulerLagrangeSystem:
    pc: PoincareCartanForm
    ideal: ExteriorIdeal
    E: sp.Expr
    closure: Optional[TriState] = None

    @property
    def chart(self):
        return self.pc.chart

    @property
    def space(self):
        return self.pc.space


def _check_classical(L, chart: JetChart):
    if chart.s != 1:
        raise VariationalError("classical Poincaré-Cartan form needs one dependent variable")
    if chart.highest_order(L) > 1:
        raise VariationalError("Lagrangian depends on coordinates of order > 1")


def pc_form_classical(L, chart: JetChart, verify: bool = True) -> PoincareCartanForm:
    """``Π = d(L dx + θ ∧ L_{p_i} dx_(i))`` on the first-order coordinate coframe."""
    L = sp.sympify(L)
    _check_classical(L, chart)
    S = chart.coframe(1)
    n = chart.n
    z = chart.z[0]
    p = [chart.pi(i) for i in range(n)]
    th = S.d_atom(z)
    for i in range(n):
        th = th - p[i] * S.d_atom(chart.x[i])
    dx = chart.dx(S)
    beta = S.zero(n - 1)
    for i in range(n):
        beta = beta - sp.diff(L, p[i]) * chart.dx_hat(i, S)
    Lambda0 = L * dx
    Lam = Lambda0 - wedge(th, beta)
    Pi = d(Lam).canonical()
    dz_field = VectorField(S, {"d" + z.name: 1})
    ideal = ExteriorIdeal(S, [th], "algebraic", leads=["d" + z.name], label="{theta}")
    Psi = ideal.reduce(contract(dz_field, Pi)).canonical()
    pc = PoincareCartanForm(chart, S, L, Lambda0, Lam, Pi, [th], [Psi], beta)
    if verify:
        pc.transcripts["dPi"] = d(Pi).is_zero(policy="exact").verdict.value
        pc.transcripts["theta^Pi"] = wedge(th, Pi).is_zero(policy="exact").verdict.value
        pc.transcripts["Pi=theta^Psi"] = (Pi - wedge(th, Psi)).is_zero(policy="exact").verdict.value
    return pc


def el_equation(L, chart: JetChart) -> sp.Expr:
    """``L_z − Σ D_i L_{p_i}`` (scalar Euler-Lagrange expression)."""
    L = sp.sympify(L)
    _check_classical(L, chart)
    z = chart.z[0]
    out = sp.diff(L, z)
    for i in range(chart.n):
        out -= chart.total_derivative(i, sp.diff(L, chart.pi(i)))
    return canonicalize(out)


def el_equations(L, chart: JetChart) -> List[sp.Expr]:
    """``E_α = L_{z^α} − Σ D_i L_{p^α_i}`` for every dependent variable (first-order L)."""
    L = sp.sympify(L)
    if chart.highest_order(L) > 1:
        raise VariationalError("Lagrangian depends on coordinates of order > 1")
    out = []
    for a in range(chart.s):
        E = sp.diff(L, chart.z[a])
        for i in range(chart.n):
            E -= chart.total_derivative(i, sp.diff(L, chart.p(a, (i,))))
        out.append(canonicalize(E))
    return out


def symbol_matrix(L, chart: JetChart) -> sp.Matrix:
    """Hessian ``L_{p_i p_j}`` (the principal symbol of the EL operator)."""
    p = [chart.pi(i) for i in range(chart.n)]
    return sp.Matrix(chart.n, chart.n, lambda i, j: sp.diff(L, p[i], p[j]))


def _display_text(e) -> str:
    s = to_text(e)
    for f in sorted({type(a).__name__ for a in sp.sympify(e).atoms(sp.Function)}, key=len, reverse=True):
        disp = display_name(f)
        if disp != f:
            s = s.replace(f + "(", disp + "(")
    return s.replace(" - ", " − ").replace("-", "−")


def el_display(E, chart: JetChart) -> str:
    """Human-readable ``… = 0`` form of an Euler-Lagrange expression.

    The sign is normalized so the second-order part has positive leading
    coefficient; ``Σ p_ii`` prints as ``Δz`` and a signature-weighted sum as
    ``□z``.
    """
    E = sp.expand(sp.sympify(E))
    n = chart.n
    z = chart.z[0]
    second = [chart.pi(i, i) for i in range(n)]
    sig = chart.signature
    lap = sum(sig[i] * second[i] for i in range(n))
    c = sp.diff(E, second[-1]) * sig[-1]
    op = "Δ" if all(s_ == 1 for s_ in sig) else "□"
    if c != 0 and not c.free_symbols:
        rest = sp.expand(E - c * lap)
        if all(sp.diff(rest, q) == 0 for q in chart.jet_coordinates(0, 2)):
            rest = sp.expand(rest / c)
            head = f"{op}{z.name}"
            if rest == 0:
                return f"{head} = 0"
            coeff, _ = rest.as_coeff_Mul()
            body = _display_text(rest)
            if body.startswith("−"):
                return f"{head} − {body[1:]} = 0"
            return f"{head} + {body} = 0"
    # general case: make the lexicographically largest second-order coefficient positive
    for q in reversed(chart.jet_coordinates(0, 2)):
        cq = sp.diff(E, q)
        if cq != 0:
            num = cq.as_coeff_Mul()[0]
            if num < 0:
                E = -E
            break
    return _display_text(E) + " = 0"


def el_solved_display(E, chart: JetChart) -> Optional[str]:
    """``Δz = …`` / ``□z = …`` when E is the (signed) Laplacian plus lower-order terms."""
    E = sp.expand(sp.sympify(E))
    n = chart.n
    sig = chart.signature
    second = [chart.pi(i, i) for i in range(n)]
    lap = sum(sig[i] * second[i] for i in range(n))
    c = sp.diff(E, second[-1]) * sig[-1]
    if c == 0 or c.free_symbols:
        return None
    rest = sp.expand(E / c - lap)
    if any(sp.diff(rest, q) != 0 for q in chart.jet_coordinates(0, 2)):
        return None
    op = "Δ" if all(s_ == 1 for s_ in sig) else "□"
    return f"{op}{chart.z[0].name} = {_display_text(-rest) if rest != 0 else '0'}"


def el_system(pc: PoincareCartanForm, check: bool = True) -> EulerLagrangeSystem:
    S = pc.space
    gens = []
    for th, psi in zip(pc.theta, pc.Psi):
        gens += [th, d(th), psi]
    ideal = ExteriorIdeal(S, gens, "algebraic", leads=["d" + z.name for z in pc.chart.z]
                          if S is pc.chart.coframe(1) else None, label="E_Lambda")
    if pc.chart.s == 1:
        E = el_equation(pc.L, pc.chart)
    else:
        E = sp.Matrix([_el_multi(pc.L, pc.chart, a) for a in range(pc.chart.s)])
    sysm = EulerLagrangeSystem(pc, ideal, E)
    if check:
        sysm.closure = TriState.combine([ideal.contains(d(psi)) for psi in pc.Psi], "dPsi")
    return sysm


def _el_multi(L, chart: JetChart, a: int):
    out = sp.diff(L, chart.z[a])
    for i in range(chart.n):
        out -= chart.total_derivative(i, sp.diff(L, chart.p(a, (i,))))
    return canonicalize(out)


# ---------------------------------------------------------------------------
# multi-contact liftings

def _omega_hat(S: CoframeSpace, chart: JetChart, I: Sequence[int]) -> DifferentialForm:
    """``ω_(I) = ∂_{i_l} ⌟ … ⌟ ∂_{i_1} ⌟ dx`` on a coframe containing the dx^i."""
    f = chart.dx(S)
    for i in I:
        f = contract(VectorField(S, {"d" + chart.x[i].name: 1}), f)
    return f


def admissible_lift(L, chart: JetChart) -> DifferentialForm:
    """``Λ = L dx + θ^α ∧ L_{p^α_i} dx_(i)`` on the adapted first-order coframe."""
    L = sp.sympify(L)
    if chart.order != 1:
        chart = JetChart(chart.n, chart.s, 1, chart.x_names, chart.z_names, chart.labels,
                         chart.p_prefix, chart.overrides, chart.signature)
    S = chart.adapted_coframe()
    Lam = L * chart.dx(S)
    for a in range(chart.s):
        th = S.basis(chart.theta_name(a, ()))
        for i in range(chart.n):
            Lam = Lam + wedge(th, sp.diff(L, chart.p(a, (i,))) * _omega_hat(S, chart, [i]))
    return Lam


def _perm_sign(seq) -> int:
    seq = list(seq)
    s = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def _H_coefficients(Pi: DifferentialForm, chart: JetChart, level: int, basis_cache: Dict):
    """H^{iI}_{αA}: coefficient of π^α_i ∧ θ^A ∧ ω_(I) with |A| = |I| = level."""
    S = Pi.space
    out = {}
    for a in range(chart.s):
        for i in range(chart.n):
            pi_name = "d" + chart.p(a, (i,)).name
            for A in itertools.combinations(range(chart.s), level):
                for I in itertools.combinations(range(chart.n), level):
                    key = (a, i, A, I)
                    if key not in basis_cache:
                        f = S.basis(pi_name)
                        for b in A:
                            f = wedge(f, S.basis(chart.theta_name(b, ())))
                        f = wedge(f, _omega_hat(S, chart, I))
                        (mono, sign), = f.terms.items()
                        basis_cache[key] = (mono, sign)
                    mono, sign = basis_cache[key]
                    out[key] = Pi.terms.get(mono, sp.Integer(0)) / sign
    return out


def _skew_condition(H, chart: JetChart, level: int):
    eqs = []
    for B in itertools.combinations(range(chart.s), level + 1):
        for K in itertools.combinations(range(chart.n), level + 1):
            t = 0
            for pa, a in enumerate(B):
                A = tuple(b for b in B if b != a)
                for pi_, i in enumerate(K):
                    I = tuple(k for k in K if k != i)
                    t += (-1) ** (pa + pi_) * H[(a, i, A, I)]
            eqs.append(((B, K), t))
    return eqs


def betounes_form(L, chart: JetChart, verify: bool = True) -> PoincareCartanForm:
    """Unique admissible lifting whose derivative is symmetric at every level."""
    L = sp.sympify(L)
    if chart.n * chart.s > 12:
        raise VariationalError("n·s exceeds the tractability guard (12)")
    if chart.order != 1:
        chart = JetChart(chart.n, chart.s, 1, chart.x_names, chart.z_names, chart.labels,
                         chart.p_prefix, chart.overrides, chart.signature)
    if chart.highest_order(L) > 1:
        raise VariationalError("Lagrangian depends on coordinates of order > 1")
    S = chart.adapted_coframe()
    Lam = admissible_lift(L, chart)
    cache: Dict = {}
    corrections = []
    for l in range(1, min(chart.n, chart.s)):
        unknowns = {}
        extra = S.zero(chart.n)
        for A in itertools.combinations(range(chart.s), l + 1):
            for I in itertools.combinations(range(chart.n), l + 1):
                Fs = sp.Symbol(f"_F_{'_'.join(map(str, A))}__{'_'.join(map(str, I))}")
                unknowns[(A, I)] = Fs
                f = S.scalar(Fs)
                for b in A:
                    f = wedge(f, S.basis(chart.theta_name(b, ())))
                extra = extra + wedge(f, _omega_hat(S, chart, I))
        Pi = d(Lam + extra)
        H = _H_coefficients(Pi, chart, l, cache)
        eqs = [e for _, e in _skew_condition(H, chart, l)]
        syms = list(unknowns.values())
        sol = sp.solve(eqs, syms, dict=True)
        if len(sol) != 1 or set(sol[0]) != set(syms):
            raise VariationalError(f"skew-part system at level {l} is not uniquely solvable")
        sol = {k: canonicalize(v) for k, v in sol[0].items()}
        Lam = (Lam + extra.xreplace(sol)).canonical()
        corrections.append({"level": l, "solution": {str(k): to_text(v) for k, v in sol.items()}})
    Pi = d(Lam).canonical()
    thetas = [S.basis(chart.theta_name(a, ())) for a in range(chart.s)]
    Psi = []
    for a in range(chart.s):
        v = VectorField(S, {chart.theta_name(a, ()): 1})
        Psi.append(contract(v, Pi))
    pc = PoincareCartanForm(chart, S, L, L * chart.dx(S), Lam, Pi, thetas, Psi)
    pc.transcripts["corrections"] = corrections
    if verify:
        pc.transcripts["dPi"] = d(Pi).is_zero(policy="exact").verdict.value
        states = []
        for l in range(1, min(chart.n, chart.s)):
            H = _H_coefficients(Pi, chart, l, cache)
            states += [is_zero(t, policy="exact") for _, t in _skew_condition(H, chart, l)]
        pc.transcripts["symmetric"] = TriState.combine(states, "skew").verdict.value if states else "Zero"
    return pc


def symmetrized_symbol(pc: PoincareCartanForm):
    """Level-1 coefficients symmetrized over (i, α) ↔ (j, β)."""
    chart = pc.chart
    H = _H_coefficients(pc.Pi, chart, 1, {})
    out = {}
    for a in range(chart.s):
        for b in range(chart.s):
            for i in range(chart.n):
                for j in range(chart.n):
                    if (a, i, (b,), (j,)) in H:
                        out[(a, i, b, j)] = H[(a, i, (b,), (j,))]
    return out


def check_stationary(section: Section, el: EulerLagrangeSystem, policy: str = "exact-then-numeric",
                     ranges=None) -> TriState:
    """Zero iff the section's jet graph annihilates Ψ."""
    if section.chart.n != el.chart.n or section.chart.x != el.chart.x:
        raise VariationalError("section and system live on different charts")
    states = []
    for psi in el.pc.Psi:
        r = restrict_to_section(psi, section, simplify=False)
        c = r.terms.get(tuple(range(section.chart.n)), sp.Integer(0))
        states.append(is_zero(c, policy=policy, ranges=ranges))
    return TriState.combine(states, "stationary")
