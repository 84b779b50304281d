"""Generalized symmetries on truncated prolongations; sine-Gordon densities."""
from __future__ import annotations

import dataclasses
import itertools
from typing import Any, Dict, List, Optional, Sequence

import sympy as sp
from sympy.polys.matrices import DomainMatrix

from .forms import DifferentialForm, ExteriorIdeal, VectorField, d, wedge
from .jets import EquationLocus, JetChart, contact_system, multi_indices, restrict_to_locus
from .noether import ConservationLaw, noether
from .scalar import TriState, Verdict, canonicalize, to_text
from .variational import el_system, pc_form_classical

__all__ = ["GensymError", "GeneratingAnsatz", "SymmetrySolution", "symmetry_residual",
           "solve_generalized_symmetries", "sine_gordon_chart", "sine_gordon_densities",
           "euclidean_generators", "span_rank", "PRINTED_SG_DENSITIES"]


class GensymError(Exception):
    pass


def symmetry_residual(E, g, locus: EquationLocus) -> sp.Expr:
    """``Σ_I ∂E/∂p_I · D_I g`` restricted to the locus."""
    ch = locus.chart
    E = sp.sympify(E)
    out = sp.Integer(0)
    for sym in E.free_symbols:
        info = ch.lookup(sym)
        if not info or info[0] != "p":
            continue
        c = sp.diff(E, sym)
        if c != 0:
            out += c * ch.D(info[2], g)
    return restrict_to_locus(out, locus)


@dataclasses.dataclass
class GeneratingAnsatz:
    """Polynomials of total degree ≤ ``degree`` in the locus coordinates up to ``order``."""

    order: int
    degree: int
    variables: List[sp.Symbol] = dataclasses.field(default_factory=list)
    monomials: List[sp.Expr] = dataclasses.field(default_factory=list)

    @classmethod
    def build(cls, locus: EquationLocus, order: int, degree: int) -> "GeneratingAnsatz":
        ch = locus.chart
        vars_ = [c for c in ch.coordinates(order) if c not in locus.table]
        mons = []
        for k in range(degree + 1):
            for combo in itertools.combinations_with_replacement(vars_, k):
                mons.append(sp.Mul(*combo))
        if not mons:
            raise GensymError("ansatz space is empty")
        return cls(order, degree, vars_, mons)

    @property
    def size(self) -> int:
        return len(self.monomials)


@dataclasses.dataclass
class SymmetrySolution:
    basis: List[sp.Expr]
    tags: List[str]
    locus: EquationLocus
    ansatz: GeneratingAnsatz
    classical_dimension: int
    transcript: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def all_classical(self) -> bool:
        return all(t == "classical" for t in self.tags)


def _nullspace(columns: List[sp.Expr], variables: Sequence[sp.Symbol]):
    """Rational nullspace of the coefficient matrix of Σ c_m R_m = 0."""
    rows: Dict[Any, Dict[int, sp.Rational]] = {}
    for j, R in enumerate(columns):
        R = sp.expand(R)
        if R == 0:
            continue
        P = sp.Poly(R, *variables)
        for mon, c in P.terms():
            if not c.is_Rational:
                raise GensymError("residual coefficients are not rational")
            rows.setdefault(mon, {})[j] = c
    keys = sorted(rows)
    M = sp.zeros(len(keys), len(columns))
    for i, k in enumerate(keys):
        for j, c in rows[k].items():
            M[i, j] = c
    if not keys:
        return [sp.Matrix.eye(len(columns))[:, j] for j in range(len(columns))], 0
    dM = DomainMatrix.from_Matrix(M).convert_to(sp.QQ)
    ns = dM.nullspace().to_Matrix()
    vecs = [ns.row(i).T for i in range(ns.rows)]
    return vecs, len(keys)


def solve_generalized_symmetries(E, chart: JetChart, order: int = 2, degree: int = 3,
                                 locus: EquationLocus = None) -> SymmetrySolution:
    """Exact linear solve for generating functions in the polynomial ansatz."""
    E = sp.sympify(E)
    eq_order = chart.highest_order(E)
    locus = locus or EquationLocus(chart, E, working_order=order + eq_order)
    ans = GeneratingAnsatz.build(locus, order, degree)
    residuals = [symmetry_residual(E, m, locus) for m in ans.monomials]
    res_vars = sorted(set().union(*[r.free_symbols for r in residuals]) | set(ans.variables),
                      key=lambda s: s.name)
    vecs, nrows = _nullspace(residuals, res_vars)
    # classical part: solutions supported on monomials of order ≤ 1
    low = [j for j, m in enumerate(ans.monomials)
           if all(chart.order_of(s) <= 1 for s in m.free_symbols)]
    high = [j for j in range(ans.size) if j not in low]
    low_cols = [residuals[j] for j in low]
    low_vecs, _ = _nullspace(low_cols, res_vars)
    full = sp.Matrix.hstack(*vecs) if vecs else sp.zeros(ans.size, 0)
    high_rank = full.extract(high, list(range(full.cols))).rank() if high and vecs else 0
    classical_dim = len(vecs) - high_rank
    basis, tags = [], []
    for v in low_vecs:
        basis.append(sp.expand(sum(v[i] * ans.monomials[low[i]] for i in range(len(low)))))
        tags.append("classical")
    # complete with non-classical representatives
    if high_rank:
        cur = [sp.Matrix([v[low.index(j)] if j in low else 0 for j in range(ans.size)]) for v in low_vecs]
        for v in vecs:
            trial = sp.Matrix.hstack(*(cur + [v]))
            if trial.rank() > len(cur):
                cur.append(v)
                basis.append(sp.expand(sum(v[j] * ans.monomials[j] for j in range(ans.size))))
                tags.append("non-classical")
    tr = {"ansatz_size": ans.size, "equations": nrows, "solution_dimension": len(vecs),
          "classical_dimension": classical_dim}
    return SymmetrySolution(basis, tags, locus, ans, classical_dim, tr)


def euclidean_generators(chart: JetChart) -> List[sp.Expr]:
    """Translations ``p_i`` and rotations ``x^i p_j − x^j p_i``."""
    n = chart.n
    p = [chart.pi(i) for i in range(n)]
    x = chart.x
    gens = list(p)
    for i in range(n):
        for j in range(i + 1, n):
            gens.append(x[i] * p[j] - x[j] * p[i])
    return gens


def span_rank(exprs: Sequence[sp.Expr], variables: Sequence[sp.Symbol]) -> int:
    rows = set()
    polys = [sp.Poly(sp.expand(e), *variables) for e in exprs]
    for P in polys:
        rows |= {m for m, _ in P.terms()}
    keys = sorted(rows)
    M = sp.Matrix([[dict(P.terms()).get(k, 0) for k in keys] for P in polys])
    return M.rank()


# ---------------------------------------------------------------------------
# sine-Gordon

def sine_gordon_chart(order: int = 2) -> JetChart:
    return JetChart(2, 1, order, x_names=["s", "t"], labels=["s", "t"],
                    overrides={"ps": "p", "pt": "q"})


def _printed_densities(ch: JetChart):
    s, t = ch.x
    z = ch.z[0]
    p, q = ch.pi(0), ch.pi(1)
    return ({s: p ** 2 / 2, t: -(sp.cos(2 * z) - 1) / 4},
            {t: q ** 2 / 2, s: (sp.cos(2 * z) - 1) / 4})


PRINTED_SG_DENSITIES = "psi1 = 1/2 p^2 ds - 1/4 (cos 2z - 1) dt ; psi2 = 1/2 q^2 dt + 1/4 (cos 2z - 1) ds"


def _one_form(ch, S, comps):
    f = S.zero(1)
    for x, c in comps.items():
        f = f + c * S.d_atom(x)
    return f


def _locus_check(psi: DifferentialForm, ch2: JetChart, locus: EquationLocus) -> TriState:
    """dψ modulo the order-2 contact system, then restricted to the locus."""
    cs = contact_system(ch2)
    red = cs.reduce(d(psi)).canonical()
    coeffs = [restrict_to_locus(c, locus) for c in red.terms.values()]
    st = TriState(Verdict.ZERO if all(canonicalize(c) == 0 for c in coeffs) else Verdict.NONZERO,
                  {"path": "exact", "horizontal": red.to_text(),
                   "on_locus": [to_text(c) for c in coeffs]})
    return st


def sine_gordon_densities():
    """Noether densities of s- and t-translation for ``Λ = (pq − ½(cos 2z − 1)) ds∧dt``.

    Returns ``(psi1, psi2, report)``; each ψ is normalized to have
    coefficient ``½p²`` on ``ds`` (resp. ``½q²`` on ``dt``) and verified on
    the locus ``z_st = ½ sin 2z``.  The report also checks the densities as
    printed in the literature.
    """
    ch1 = sine_gordon_chart(1)
    ch2 = sine_gordon_chart(2)
    z = ch1.z[0]
    p, q = ch1.pi(0), ch1.pi(1)
    L = p * q - (sp.cos(2 * z) - 1) / 2
    pc = pc_form_classical(L, ch1)
    el = el_system(pc, check=False)
    S1 = pc.space
    laws = []
    for i in range(2):
        v = VectorField.from_coordinates(S1, {ch1.x[i]: 1})
        laws.append(noether(v, pc, el))
    S2 = ch2.coframe(2)
    locus = EquationLocus(ch2, ch2.pi(0, 1) - sp.sin(2 * z) / 2, working_order=2)
    out = []
    for i, law in enumerate(laws):
        comps = {}
        for x in ch1.x:
            comps[x] = law.phi.terms.get((S1.index["d" + x.name],), sp.Integer(0))
        lead = comps[ch1.x[i]]
        target = (p if i == 0 else q) ** 2 / 2
        scale = canonicalize(target / lead)
        comps = {x: canonicalize(scale * c) for x, c in comps.items()}
        psi = _one_form(ch2, S2, comps)
        st = _locus_check(psi, ch2, locus)
        cl = ConservationLaw(psi, locus_ideal(ch2, locus), f"sine-Gordon/{'st'[i]}-translation",
                             transcript=st)
        cl.extra["noether_phi"] = law.phi.to_text()
        cl.extra["noether_membership"] = law.transcript.verdict.value
        cl.extra["scale"] = to_text(scale)
        cl.extra["components"] = {x.name: to_text(c) for x, c in comps.items()}
        out.append(cl)
    printed = _printed_densities(ch2)
    report = {}
    for i, comps in enumerate(printed):
        psi = _one_form(ch2, S2, comps)
        st = _locus_check(psi, ch2, locus)
        same = (psi - out[i].phi).canonical()
        report[f"printed psi{i + 1}"] = {"verdict": st.verdict.value,
                                         "matches_noether": not same.terms,
                                         "on_locus": st.transcript["on_locus"]}
    return out[0], out[1], report


def locus_ideal(ch2: JetChart, locus: EquationLocus):
    return contact_system(ch2).ideal
