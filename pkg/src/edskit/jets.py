"""Jet charts, contact systems, total derivatives, equation loci and sections.

Coordinates on a jet chart are ``x^i`` (independent), ``z^α`` (dependent)
and ``p^α_I`` for sorted multi-indices ``I`` of length ``1..order``.  Higher
coordinates are created on demand, so total derivatives never run out of
room; the chart's *order* only fixes which coframe and contact system it
presents.
"""
from __future__ import annotations

import itertools
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp

from .forms import (CoframeSpace, DifferentialForm, ExteriorIdeal, FormError, pullback)
from .scalar import canonicalize

__all__ = ["JetError", "UncoveredCoordinateError", "JetChart", "ContactSystem",
           "EquationLocus", "Section", "total_derivative", "contact_system", "prolong",
           "restrict_to_locus", "restrict_to_section", "multi_indices"]


class JetError(Exception):
    pass


class UncoveredCoordinateError(JetError):
    pass


MultiIndex = Tuple[int, ...]


def multi_indices(n: int, k: int) -> List[MultiIndex]:
    """Sorted multi-indices of length exactly ``k`` over ``range(n)``."""
    return [tuple(c) for c in itertools.combinations_with_replacement(range(n), k)]


def _add(I: MultiIndex, j: int) -> MultiIndex:
    return tuple(sorted(I + (j,)))


def _contains(J: MultiIndex, L: MultiIndex) -> bool:
    Jl = list(J)
    for i in L:
        if i in Jl:
            Jl.remove(i)
        else:
            return False
    return True


def _minus(J: MultiIndex, L: MultiIndex) -> MultiIndex:
    Jl = list(J)
    for i in L:
        Jl.remove(i)
    return tuple(Jl)


class JetChart:
    """Chart ``(x^i, z^α, p^α_I)`` on the jet space of order ``order``.

    Naming: with one dependent variable ``p_I`` is ``<prefix><labels of I>``
    (``p1``, ``p12``, ``p33``); with several it is ``<prefix><α>_<labels>``.
    ``overrides`` renames individual coordinates, keyed by the default name.
    ``signature`` gives a metric sign per independent coordinate (``-1`` for
    a Lorentzian time direction).
    """

    def __init__(self, n: int, s: int = 1, order: int = 1, x_names: Sequence[str] = None,
                 z_names: Sequence[str] = None, labels: Sequence[str] = None,
                 p_prefix: str = "p", overrides: Mapping[str, str] = None,
                 signature: Sequence[int] = None, z_assumptions: Mapping[str, Any] = None,
                 x_assumptions: Mapping[str, Any] = None):
        if n < 1 or s < 1 or order < 0:
            raise JetError("need n ≥ 1, s ≥ 1, order ≥ 0")
        self.n, self.s, self.order = n, s, order
        self.x_names = list(x_names) if x_names else ([f"x{i + 1}" for i in range(n)] if n > 1 else ["x"])
        self.z_names = list(z_names) if z_names else (["z"] if s == 1 else [f"z{a + 1}" for a in range(s)])
        if len(self.x_names) != n or len(self.z_names) != s:
            raise JetError("name list lengths do not match n, s")
        self.labels = list(labels) if labels else [str(i + 1) for i in range(n)]
        self.p_prefix = p_prefix
        self.overrides = dict(overrides or {})
        self.signature = list(signature) if signature else [1] * n
        self._x_assumptions = dict(x_assumptions or {})
        self._z_assumptions = dict(z_assumptions or {})
        self.x = [sp.Symbol(nm, **self._x_assumptions) for nm in self.x_names]
        self.z = [sp.Symbol(nm, **self._z_assumptions) for nm in self.z_names]
        self._p: Dict[Tuple[int, MultiIndex], sp.Symbol] = {}
        self._lookup: Dict[sp.Symbol, Tuple] = {}
        for i, xs in enumerate(self.x):
            self._lookup[xs] = ("x", i)
        for a, zs in enumerate(self.z):
            self._lookup[zs] = ("p", a, ())
            self._p[(a, ())] = zs
        for k in range(1, order + 1):
            for a in range(s):
                for I in multi_indices(n, k):
                    self.p(a, I)
        self._coframes: Dict[str, CoframeSpace] = {}

    # -- coordinates -----------------------------------------------------
    def _pname(self, a: int, I: MultiIndex) -> str:
        lab = "".join(self.labels[i] for i in I)
        name = f"{self.p_prefix}{lab}" if self.s == 1 else f"{self.p_prefix}{a + 1}_{lab}"
        return self.overrides.get(name, name)

    def p(self, a: int, I: Iterable[int] = None) -> sp.Symbol:
        """Coordinate ``p^a_I`` (``I = ()`` is ``z^a``); one-argument form for s=1."""
        if I is None:
            a, I = 0, a
        I = tuple(sorted(I))
        key = (a, I)
        if key not in self._p:
            sym = sp.Symbol(self._pname(a, I))
            self._p[key] = sym
            self._lookup[sym] = ("p", a, I)
        return self._p[key]

    def pi(self, *idx: int) -> sp.Symbol:
        """Shorthand for the s=1 coordinate with 0-based multi-index ``idx``."""
        return self.p(0, tuple(idx))

    def lookup(self, sym: sp.Symbol):
        return self._lookup.get(sym)

    def order_of(self, sym: sp.Symbol) -> int:
        info = self._lookup.get(sym)
        if info is None or info[0] == "x":
            return -1
        return len(info[2])

    def coordinates(self, order: int = None) -> List[sp.Symbol]:
        k = self.order if order is None else order
        out = list(self.x)
        for j in range(0, k + 1):
            for a in range(self.s):
                for I in multi_indices(self.n, j):
                    out.append(self.p(a, I))
        return out

    def jet_coordinates(self, a: int, k: int) -> List[sp.Symbol]:
        return [self.p(a, I) for I in multi_indices(self.n, k)]

    def symbol_table(self) -> Dict[str, sp.Symbol]:
        return {s.name: s for s in self._lookup}

    def highest_order(self, e) -> int:
        e = sp.sympify(e)
        return max([self.order_of(s) for s in e.free_symbols] + [-1])

    # -- total derivatives -------------------------------------------------
    def total_derivative(self, i: int, e) -> sp.Expr:
        """``D_i e = ∂_i e + Σ p^α_{I+i} ∂e/∂p^α_I``."""
        e = sp.sympify(e)
        out = sp.diff(e, self.x[i])
        for sym in e.free_symbols:
            info = self._lookup.get(sym)
            if info is None or info[0] != "p":
                continue
            _, a, I = info
            de = sp.diff(e, sym)
            if de != 0:
                out += self.p(a, _add(I, i)) * de
        return sp.expand(out, power_exp=False)

    def D(self, I: Iterable[int], e) -> sp.Expr:
        for i in I:
            e = self.total_derivative(i, e)
        return e

    # -- coframes --------------------------------------------------------
    def coframe(self, order: int = None) -> CoframeSpace:
        """Coordinate coframe ``(dx, dz, dp_I)`` up to ``order`` (default: chart order)."""
        k = self.order if order is None else order
        key = f"coord{k}"
        if key not in self._coframes:
            self._coframes[key] = CoframeSpace.coordinates(self.coordinates(k), label=f"J^{k} coordinates")
        return self._coframes[key]

    def base_coframe(self) -> CoframeSpace:
        if "base" not in self._coframes:
            self._coframes["base"] = CoframeSpace.coordinates(self.x, label="base")
        return self._coframes["base"]

    def theta_name(self, a: int, I: MultiIndex) -> str:
        lab = "".join(self.labels[i] for i in I)
        if self.s == 1:
            return "theta" + (("_" + lab) if lab else "")
        return f"theta{a + 1}" + (("_" + lab) if lab else "")

    def adapted_coframe(self) -> CoframeSpace:
        """Coframe ``(θ^α_I (|I| < order), dx^i, dp^α_I (|I| = order))``."""
        if "adapted" in self._coframes:
            return self._coframes["adapted"]
        k = self.order
        if k < 1:
            raise JetError("adapted coframe needs order ≥ 1")
        low = [(a, I) for j in range(k) for a in range(self.s) for I in multi_indices(self.n, j)]
        top = [(a, I) for a in range(self.s) for I in multi_indices(self.n, k)]
        dx = ["d" + x.name for x in self.x]
        names = [self.theta_name(a, I) for a, I in low] + dx + ["d" + self.p(a, I).name for a, I in top]

        def elem(a, I):
            if len(I) < k:
                return self.theta_name(a, I)
            return "d" + self.p(a, I).name

        structure = {}
        for a, I in low:
            structure[self.theta_name(a, I)] = {(elem(a, _add(I, j)), dx[j]): -1 for j in range(self.n)}
        atoms = {}
        for i, x in enumerate(self.x):
            atoms[x] = {dx[i]: 1}
        for a, I in low:
            spec = {self.theta_name(a, I): 1}
            for j in range(self.n):
                spec[dx[j]] = self.p(a, _add(I, j))
            atoms[self.p(a, I)] = spec
        for a, I in top:
            atoms[self.p(a, I)] = {"d" + self.p(a, I).name: 1}
        expansion = {}
        for i, x in enumerate(self.x):
            expansion[dx[i]] = {x: 1}
        for a, I in low:
            e = {self.p(a, I): 1}
            for j in range(self.n):
                e[self.x[j]] = -self.p(a, _add(I, j))
            expansion[self.theta_name(a, I)] = e
        for a, I in top:
            expansion["d" + self.p(a, I).name] = {self.p(a, I): 1}
        sp_ = CoframeSpace(names, atoms=atoms, structure=structure, expansion=expansion,
                           label=f"J^{k} adapted")
        self._coframes["adapted"] = sp_
        return sp_

    def contact_forms(self, space: CoframeSpace = None) -> List[DifferentialForm]:
        """``θ^α_I = dp^α_I − p^α_{Ij} dx^j`` for ``|I| < order`` on the coordinate coframe."""
        S = space or self.coframe()
        out = []
        for j in range(self.order):
            for a in range(self.s):
                for I in multi_indices(self.n, j):
                    th = S.d_atom(self.p(a, I))
                    for i in range(self.n):
                        th = th - self.p(a, _add(I, i)) * S.d_atom(self.x[i])
                    out.append(th)
        return out

    def theta(self, a: int = 0, I: MultiIndex = ()) -> DifferentialForm:
        S = self.coframe()
        th = S.d_atom(self.p(a, I))
        for i in range(self.n):
            th = th - self.p(a, _add(I, i)) * S.d_atom(self.x[i])
        return th

    def dx(self, space: CoframeSpace = None) -> DifferentialForm:
        S = space or self.coframe()
        out = S.scalar(1)
        for x in self.x:
            out = out ^ S.d_atom(x)
        return out

    def dx_hat(self, i: int, space: CoframeSpace = None) -> DifferentialForm:
        """``dx_(i) = ∂_i ⌟ dx`` (sign ``(−1)^i`` times the omitted wedge)."""
        S = space or self.coframe()
        out = S.scalar((-1) ** i)
        for j, x in enumerate(self.x):
            if j != i:
                out = out ^ S.d_atom(x)
        return out

    def contact_system(self) -> "ContactSystem":
        return contact_system(self)

    def prolong(self, by: int = 1) -> "JetChart":
        return prolong(self, by)

    def _clone(self, order: int) -> "JetChart":
        c = JetChart(self.n, self.s, order, self.x_names, self.z_names, self.labels,
                     self.p_prefix, self.overrides, self.signature,
                     self._z_assumptions, self._x_assumptions)
        return c

    def __repr__(self):
        return f"JetChart(n={self.n}, s={self.s}, order={self.order}, x={self.x_names}, z={self.z_names})"


def total_derivative(i: int, e, chart: JetChart) -> sp.Expr:
    return chart.total_derivative(i, e)


class ContactSystem:
    """The contact ideal of a chart on its coordinate coframe."""

    def __init__(self, chart: JetChart):
        self.chart = chart
        self.space = chart.coframe()
        self.forms = chart.contact_forms(self.space)
        leads = ["d" + chart.p(a, I).name
                 for j in range(chart.order) for a in range(chart.s)
                 for I in multi_indices(chart.n, j)]
        self.ideal = ExteriorIdeal(self.space, self.forms, "algebraic", leads=leads,
                                   label="contact")
        self.differential_ideal = ExteriorIdeal(self.space, self.forms, "differential",
                                                leads=leads, label="contact (differential)")

    @property
    def generators(self):
        return self.forms

    @property
    def leads(self):
        return self.ideal.lead_names

    def reduce(self, f):
        return self.ideal.reduce(f)

    def __len__(self):
        return len(self.forms)


def contact_system(chart: JetChart) -> ContactSystem:
    if chart.order < 1:
        raise JetError("contact system needs order ≥ 1")
    return ContactSystem(chart)


def prolong(chart: JetChart, by: int = 1) -> JetChart:
    return chart._clone(chart.order + by)


def _glex_key(I: MultiIndex):
    return (len(I), I)


class EquationLocus:
    """Prolonged equation locus ``{D_I E = 0}`` up to ``working_order``.

    Each equation is solved for a distinguished top-order coordinate (the
    graded-lexicographically largest one in which it is linear); every
    coordinate ``p_J`` with ``J`` containing that lead is then expressed
    through ``D_{J−lead} E``.
    """

    def __init__(self, chart: JetChart, E, working_order: int = None, lead=None):
        self.chart = chart
        self.E = sp.sympify(E)
        k = chart.highest_order(self.E)
        if k < 1:
            raise JetError("equation must involve derivative coordinates")
        self.equation_order = k
        self.working_order = max(working_order or k, k)
        if lead is None:
            lead = self._choose_lead()
        elif isinstance(lead, sp.Symbol):
            info = chart.lookup(lead)
            lead = (info[1], info[2])
        self.lead_alpha, self.lead = lead
        lsym = chart.p(self.lead_alpha, self.lead)
        coef = sp.diff(self.E, lsym)
        rest = sp.expand(self.E - coef * lsym)
        self.lead_symbol = lsym
        self.solution = canonicalize(-rest / coef)
        self.table: Dict[sp.Symbol, sp.Expr] = {}
        self._build()

    def _choose_lead(self):
        ch = self.chart
        cands = []
        for sym in self.E.free_symbols:
            info = ch.lookup(sym)
            if info and info[0] == "p" and len(info[2]) == self.equation_order:
                c = sp.diff(self.E, sym)
                if c != 0 and sp.diff(c, sym) == 0 and canonicalize(c) != 0:
                    cands.append((info[1], info[2]))
        if not cands:
            raise JetError("equation is not linear in any top-order coordinate")
        return max(cands, key=lambda t: (t[0] == 0, _glex_key(t[1])))

    def eliminated(self, J: MultiIndex) -> bool:
        return _contains(J, self.lead)

    def _build(self):
        ch = self.chart
        a = self.lead_alpha
        table = self.table
        table[self.lead_symbol] = self.solution
        for k in range(len(self.lead) + 1, self.working_order + 1):
            level = [J for J in multi_indices(ch.n, k) if self.eliminated(J)]
            raw = {}
            for J in level:
                K = _minus(J, self.lead)
                j = K[-1]
                prev = ch.p(a, _minus(J, (j,)))
                raw[ch.p(a, J)] = ch.total_derivative(j, table[prev])
            table.update(raw)
            for _ in range(4 * len(level) + 4):
                changed = False
                for sym in list(raw):
                    v = table[sym].xreplace(table)
                    if v != table[sym]:
                        table[sym] = sp.expand(v, power_exp=False)
                        changed = True
                if not changed:
                    break
            else:
                raise JetError("locus substitution did not terminate")
        # final pass: every entry free of eliminated coordinates
        for sym in table:
            table[sym] = canonicalize(table[sym])

    def uncovered(self, e) -> List[sp.Symbol]:
        out = []
        for sym in sp.sympify(e).free_symbols:
            info = self.chart.lookup(sym)
            if (info and info[0] == "p" and info[1] == self.lead_alpha
                    and len(info[2]) > self.working_order and self.eliminated(info[2])):
                out.append(sym)
        return sorted(out, key=lambda s: s.name)

    def restrict(self, e) -> sp.Expr:
        return restrict_to_locus(e, self)

    def remaining_coordinates(self) -> List[sp.Symbol]:
        return [c for c in self.chart.coordinates(self.working_order) if c not in self.table]

    def coframe(self) -> CoframeSpace:
        key = f"locus:{self.E}:{self.working_order}"
        if key not in self.chart._coframes:
            self.chart._coframes[key] = CoframeSpace.coordinates(self.remaining_coordinates(),
                                                                 label="locus")
        return self.chart._coframes[key]


def restrict_to_locus(e, locus: EquationLocus):
    """Substitute the locus relations into a scalar or (pull back) a form."""
    if isinstance(e, DifferentialForm):
        for c in e.terms.values():
            bad = locus.uncovered(c)
            if bad:
                raise UncoveredCoordinateError(f"locus does not cover {bad}")
        return pullback(e, locus.coframe(), atom_map=locus.table).canonical()
    e = sp.sympify(e)
    bad = locus.uncovered(e)
    if bad:
        raise UncoveredCoordinateError(f"locus does not cover {bad}")
    return canonicalize(e.xreplace(locus.table))


class Section:
    """A local section ``z^α = z^α(x)`` and its jet graph ``p^α_I = ∂_I z^α``."""

    def __init__(self, chart: JetChart, z_exprs):
        if not isinstance(z_exprs, (list, tuple)):
            z_exprs = [z_exprs]
        if len(z_exprs) != chart.s:
            raise JetError("need one expression per dependent variable")
        self.chart = chart
        self.z_exprs = [sp.sympify(z) for z in z_exprs]
        self._cache: Dict[Tuple[int, MultiIndex], sp.Expr] = {}

    def value(self, a: int, I: MultiIndex) -> sp.Expr:
        I = tuple(sorted(I))
        key = (a, I)
        if key not in self._cache:
            if not I:
                self._cache[key] = self.z_exprs[a]
            else:
                self._cache[key] = sp.diff(self.value(a, I[:-1]), self.chart.x[I[-1]])
        return self._cache[key]

    def atom_map(self, order: int) -> Dict[sp.Symbol, sp.Expr]:
        m = {}
        for k in range(order + 1):
            for a in range(self.chart.s):
                for I in multi_indices(self.chart.n, k):
                    m[self.chart.p(a, I)] = self.value(a, I)
        return m

    def evaluate(self, e) -> sp.Expr:
        e = sp.sympify(e)
        k = max(self.chart.highest_order(e), 0)
        return e.xreplace(self.atom_map(k))


def restrict_to_section(f: DifferentialForm, s: Section, simplify: bool = True) -> DifferentialForm:
    """Pull a form on the chart back along the jet graph of ``s``."""
    ch = s.chart
    atoms = set(f.space.atoms)
    if not atoms <= set(ch.symbol_table().values()):
        raise JetError("form does not live on the section's chart")
    k = max([ch.order_of(a) for a in atoms] + [0])
    out = pullback(f, ch.base_coframe(), atom_map=s.atom_map(k))
    return out.canonical() if simplify else out
