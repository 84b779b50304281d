"""Symplectic linear algebra on a 2n-dimensional block of a coframe.

Lefschetz powers, primitivity, the Lepage (primitive) decomposition
ξ = Σ Θ^i ∧ ξ_i, and primitive normalization of Monge-Ampère generators.
"""
from __future__ import annotations

import dataclasses
from typing import Any, Dict, List, Optional, Sequence

import sympy as sp

from .forms import (CoframeSpace, DifferentialForm, ExteriorIdeal, FormError, wedge)
from .scalar import TriState, Verdict, canonicalize

__all__ = ["SymplecticError", "SymplecticModel", "LepageDecomposition",
           "lefschetz_power", "is_primitive", "lepage_decompose", "primitive_normalize"]


class SymplecticError(FormError):
    pass


class SymplecticModel:
    """A 2n-dimensional sub-coframe with a nondegenerate 2-form Θ.

    ``indices`` names the 2n basis elements; forms handed to the model must
    only involve these.  With ``pairs=[(π_1, ω^1), …]`` and no explicit Θ the
    default ``Θ = −Σ π_i ∧ ω^i`` is used.
    """

    def __init__(self, space: CoframeSpace, indices: Sequence[str] = None,
                 theta: DifferentialForm = None, n: int = None,
                 pairs: Sequence = None):
        self.space = space
        if pairs is not None:
            indices = [x for pr in pairs for x in pr]
            if theta is None:
                theta = space.zero(2)
                for pi, om in pairs:
                    theta = theta - space.b(pi, om)
        if indices is None:
            raise SymplecticError("indices or pairs required")
        self.indices = sorted(space._idx(i) for i in indices)
        if len(self.indices) % 2:
            raise SymplecticError("odd-dimensional block")
        self.n = n if n is not None else len(self.indices) // 2
        if 2 * self.n != len(self.indices):
            raise SymplecticError("n does not match the block dimension")
        if theta is None or theta.degree != 2:
            raise SymplecticError("a 2-form Θ is required")
        self._check_support(theta)
        self.theta = theta
        self._powers = [space.scalar(1)]
        self._inv_cache: Dict[int, Any] = {}
        top = self.theta_power(self.n)
        if not top.canonical().terms:
            raise SymplecticError("Θ^n = 0: Θ is degenerate on the block")
        self.constant = all(not sp.sympify(c).free_symbols for c in theta.terms.values())

    def _check_support(self, f: DifferentialForm):
        allowed = set(self.indices)
        for m in f.terms:
            if not set(m) <= allowed:
                raise SymplecticError(
                    f"form involves {self.space.mono_name(m)} outside the symplectic block")

    def theta_power(self, k: int) -> DifferentialForm:
        while len(self._powers) <= k:
            self._powers.append(wedge(self._powers[-1], self.theta))
        return self._powers[k]

    def monomials(self, degree: int):
        return self.space.monomials(degree, self.indices) if degree >= 0 else []

    def lefschetz_matrix(self, k: int, degree: int) -> sp.Matrix:
        """Matrix of f ↦ Θ^k ∧ f from degree ``degree`` to ``degree + 2k``."""
        src = self.monomials(degree)
        dst = self.monomials(degree + 2 * k)
        pos = {m: i for i, m in enumerate(dst)}
        M = sp.zeros(len(dst), len(src))
        Tk = self.theta_power(k)
        for j, m in enumerate(src):
            img = wedge(Tk, DifferentialForm(self.space, {m: 1}, degree))
            for mm, c in img.terms.items():
                M[pos[mm], j] = c
        return M

    def lefschetz_rank_ok(self, k: int) -> bool:
        """Θ^k: Λ^{n−k} → Λ^{n+k} has trivial kernel (exact rank)."""
        M = self.lefschetz_matrix(k, self.n - k)
        return M.rank(simplify=True) == M.shape[1]

    def _solver(self, k: int, degree: int):
        key = (k, degree)
        if key in self._inv_cache:
            return self._inv_cache[key]
        M = self.lefschetz_matrix(k, degree)
        if M.shape[0] != M.shape[1]:
            raise SymplecticError("non-square Lefschetz system")
        if self.constant:
            inv = M.inv()
        else:
            inv = M.inv(method="LU")
            inv = inv.applyfunc(sp.cancel)
        self._inv_cache[key] = inv
        return inv

    def vector(self, f: DifferentialForm) -> sp.Matrix:
        mons = self.monomials(f.degree)
        return sp.Matrix([f.terms.get(m, 0) for m in mons])

    def from_vector(self, v, degree: int) -> DifferentialForm:
        mons = self.monomials(degree)
        return DifferentialForm(self.space, {m: v[i] for i, m in enumerate(mons)}, degree)


def lefschetz_power(k: int, f: DifferentialForm, m: SymplecticModel) -> DifferentialForm:
    if not 0 <= k <= m.n or f.degree != m.n - k:
        raise SymplecticError(f"degree {f.degree} does not match n−k = {m.n - k}")
    m._check_support(f)
    return wedge(m.theta_power(k), f)


def is_primitive(f: DifferentialForm, m: SymplecticModel, policy: str = "exact-then-numeric") -> TriState:
    """Primitivity of a form of degree n−k: tests Θ^{k+1} ∧ f = 0."""
    if not 0 <= f.degree <= m.n:
        raise SymplecticError("degree out of range for a primitivity test")
    m._check_support(f)
    k = m.n - f.degree
    st = wedge(m.theta_power(k + 1), f).is_zero(policy=policy)
    st.transcript["test"] = f"Theta^{k + 1} ^ f"
    return st


@dataclasses.dataclass
class LepageDecomposition:
    """ξ = Σ_i Θ^i ∧ ξ_i with every ξ_i primitive."""

    form: DifferentialForm
    components: List[DifferentialForm]
    model: SymplecticModel
    transcripts: List[Dict[str, Any]] = dataclasses.field(default_factory=list)

    def reassemble(self) -> DifferentialForm:
        out = self.form.space.zero(self.form.degree)
        for i, c in enumerate(self.components):
            out = out + wedge(self.model.theta_power(i), c)
        return out

    def verify(self) -> TriState:
        states = [(self.reassemble() - self.form).is_zero()]
        states += [is_primitive(c, self.model) for c in self.components]
        return TriState.combine(states, "lepage")


def lepage_decompose(f: DifferentialForm, m: SymplecticModel) -> LepageDecomposition:
    if not 0 <= f.degree <= m.n:
        raise SymplecticError("Lepage decomposition needs degree ≤ n")
    m._check_support(f)
    comps: List[DifferentialForm] = []
    trans = []
    xi = f
    while True:
        p = xi.degree
        k = m.n - p
        if p < 2:
            comps.append(xi)
            break
        # Θ^{k+2} ∧ η = Θ^{k+1} ∧ ξ,   deg η = p − 2
        rhs = wedge(m.theta_power(k + 1), xi)
        inv = m._solver(k + 2, p - 2)
        b = sp.Matrix([rhs.terms.get(mm, 0) for mm in m.monomials(p + 2 * k + 2)])
        eta_v = inv * b
        if not m.constant:
            eta_v = eta_v.applyfunc(canonicalize)
        eta = m.from_vector(eta_v, p - 2)
        xi0 = xi - wedge(m.theta, eta)
        comps.append(xi0)
        trans.append({"degree": p, "solve": f"Theta^{k + 2} eta = Theta^{k + 1} xi"})
        xi = eta
    return LepageDecomposition(f, comps, m, trans)


def primitive_normalize(psi: DifferentialForm, theta: DifferentialForm,
                        dtheta: DifferentialForm = None) -> DifferentialForm:
    """Remove the dθ-trace part of an n-form modulo θ.

    Returns ψ − dθ∧η where the reduction of ψ modulo θ decomposes as
    ξ₀ + Θ∧η, so the result is primitive modulo θ.
    """
    space = psi.space
    if dtheta is None:
        dtheta = theta.d()
    ideal = ExteriorIdeal(space, [theta], "algebraic", label="{theta}")
    Th = ideal.reduce(dtheta).canonical()
    block = [space.names[i] for i in ideal.non_leads]
    # restrict to the basis elements that Θ actually involves
    used = sorted({i for mono in Th.terms for i in mono})
    try:
        model = SymplecticModel(space, [space.names[i] for i in used], Th)
    except SymplecticError as err:
        raise SymplecticError(f"dθ is degenerate modulo θ: {err}")
    red = ideal.reduce(psi).canonical()
    if red.degree != model.n:
        raise SymplecticError("ψ must have degree n")
    dec = lepage_decompose(red, model)
    eta = space.zero(model.n - 2)
    for i, c in enumerate(dec.components[1:], start=1):
        eta = eta + wedge(model.theta_power(i - 1), c)
    return (psi - wedge(dtheta, eta)).canonical()
