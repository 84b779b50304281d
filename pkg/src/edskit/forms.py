"""Exterior algebra over a coframe with structure equations.

A :class:`CoframeSpace` is a finite ordered list of basis 1-forms together
with

* a *structure rule* for every basis element (``None`` when the element is the
  differential of a chart coordinate, otherwise its exterior derivative as a
  2-form in the same basis), and
* a table of *atoms*: the scalar symbols that vary on the space, each with
  its differential written in the basis.  Symbols that are not atoms are
  treated as constants (parameters).

Forms are dictionaries from strictly increasing index tuples to SymPy
coefficients.  The exterior derivative uses the Leibniz rule: coefficient
partials along atoms plus the structure rules on basis monomials.
"""
from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp

from .scalar import (SamplingConfig, TriState, Verdict, canonicalize, is_zero,
                     to_json as expr_to_json, to_text)

__all__ = [
    "FormError", "CoframeMismatchError", "NonTriangularError", "NotCoordinateExactError",
    "CoframeSpace", "DifferentialForm", "VectorField", "ExteriorIdeal",
    "wedge", "d", "contract", "lie_derivative", "reduce_mod", "in_ideal", "pullback",
    "wedge_all", "homotopy",
]


class FormError(Exception):
    pass


class CoframeMismatchError(FormError):
    pass


class NonTriangularError(FormError):
    pass


class NotCoordinateExactError(FormError):
    pass


Mono = Tuple[int, ...]


def _wedge_mono(a: Mono, b: Mono):
    """Sign and merged monomial of e_a ∧ e_b, or (0, None) if they overlap."""
    if not a:
        return 1, b
    if not b:
        return 1, a
    sb = set(b)
    if any(i in sb for i in a):
        return 0, None
    inv = 0
    for i in a:
        for j in b:
            if j < i:
                inv += 1
    return (-1 if inv % 2 else 1), tuple(sorted(a + b))


def _clean(c):
    c = sp.expand(sp.sympify(c), power_exp=False)
    return c


class CoframeSpace:
    """Finite coframe with structure equations and a table of varying atoms.

    Parameters
    ----------
    names:
        ordered basis 1-form names.
    atoms:
        mapping ``Symbol -> {basis name: coefficient}`` giving ``d(atom)``.
    structure:
        mapping ``basis name -> {(name_a, name_b): coefficient}`` giving
        ``d(e)`` as a 2-form; missing names are coordinate-exact.
    expansion:
        optional mapping ``basis name -> {atom: coefficient}`` writing a basis
        element as a combination of atom differentials; used by
        :func:`pullback` and for vector fields given in coordinates.
    check:
        verify ``d∘d = 0`` on basis elements and atoms.
    """

    def __init__(self, names: Sequence[str], atoms: Mapping = None,
                 structure: Mapping = None, expansion: Mapping = None,
                 check: bool = True, label: str = ""):
        self.names = list(names)
        if len(set(self.names)) != len(self.names):
            raise FormError("duplicate basis names")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.dim = len(self.names)
        self.label = label
        self._atom_d: Dict[sp.Symbol, Dict[Mono, Any]] = {}
        for a, df in (atoms or {}).items():
            self._atom_d[a] = self._terms_from_spec(df, 1)
        self._structure: List[Optional[Dict[Mono, Any]]] = [None] * self.dim
        for n, spec in (structure or {}).items():
            self._structure[self.index[n]] = self._terms_from_spec(spec, 2)
        self.expansion: Dict[int, Dict[sp.Symbol, Any]] = {}
        for n, spec in (expansion or {}).items():
            self.expansion[self.index[n]] = {a: sp.sympify(c) for a, c in spec.items()}
        self._dmono_cache: Dict[Mono, Dict[Mono, Any]] = {}
        self.d2_transcript: Dict[str, Any] = {}
        if check:
            self.check_d_squared()

    # -- construction helpers -------------------------------------------
    @classmethod
    def coordinates(cls, symbols: Sequence[sp.Symbol], prefix: str = "d", label: str = ""):
        """Coordinate-exact coframe ``(dx_1, …, dx_N)`` for the given symbols."""
        names = [prefix + s.name for s in symbols]
        atoms = {s: {prefix + s.name: 1} for s in symbols}
        expansion = {prefix + s.name: {s: 1} for s in symbols}
        return cls(names, atoms=atoms, expansion=expansion, check=False, label=label)

    def _terms_from_spec(self, spec, degree) -> Dict[Mono, Any]:
        if isinstance(spec, DifferentialForm):
            return dict(spec.terms)
        out: Dict[Mono, Any] = {}
        items = spec.items() if isinstance(spec, Mapping) else [(k, c) for c, *k in spec]
        for key, c in items:
            if isinstance(key, str):
                key = (key,)
            key = tuple(key)
            if len(key) != degree:
                raise FormError(f"expected degree {degree} term, got {key}")
            idx = [self.index[k] if isinstance(k, str) else int(k) for k in key]
            sign, mono = _wedge_mono_list(idx)
            if sign == 0:
                continue
            out[mono] = out.get(mono, 0) + sign * sp.sympify(c)
        return {m: _clean(c) for m, c in out.items() if _clean(c) != 0}

    @property
    def atoms(self) -> List[sp.Symbol]:
        return list(self._atom_d)

    def is_coordinate_exact(self) -> bool:
        return all(s is None for s in self._structure)

    def structure_of(self, name_or_index) -> "DifferentialForm":
        i = self._idx(name_or_index)
        s = self._structure[i]
        return DifferentialForm(self, s or {}, 2)

    def _idx(self, k) -> int:
        return self.index[k] if isinstance(k, str) else int(k)

    # -- building forms --------------------------------------------------
    def basis(self, name) -> "DifferentialForm":
        return DifferentialForm(self, {(self._idx(name),): sp.Integer(1)}, 1)

    def b(self, *names) -> "DifferentialForm":
        """Wedge of the named basis elements (``b()`` is the constant 1)."""
        f = self.scalar(1)
        for n in names:
            f = f ^ self.basis(n)
        return f

    def scalar(self, c) -> "DifferentialForm":
        return DifferentialForm(self, {(): c}, 0)

    def zero(self, degree: int) -> "DifferentialForm":
        return DifferentialForm(self, {}, degree)

    def form(self, spec, degree: int = None) -> "DifferentialForm":
        """Build a form from ``{(name, …): coeff}`` or ``[(coeff, name, …), …]``."""
        items = spec.items() if isinstance(spec, Mapping) else [(tuple(k), c) for c, *k in spec]
        acc = None
        for key, c in items:
            if isinstance(key, str):
                key = (key,)
            term = self.scalar(c)
            for k in key:
                term = term ^ self.basis(k)
            acc = term if acc is None else acc + term
        if acc is None:
            return self.zero(degree or 0)
        return acc

    def d_atom(self, a: sp.Symbol) -> "DifferentialForm":
        if a not in self._atom_d:
            return self.zero(1)
        return DifferentialForm(self, self._atom_d[a], 1)

    def volume(self, names: Sequence[str] = None) -> "DifferentialForm":
        return self.b(*(names or self.names))

    # -- exterior derivative machinery -------------------------------------
    def _d_scalar(self, c) -> Dict[Mono, Any]:
        out: Dict[Mono, Any] = {}
        c = sp.sympify(c)
        if not c.free_symbols:
            return out
        for a in c.free_symbols:
            if a not in self._atom_d:
                continue
            da = sp.diff(c, a)
            if da == 0:
                continue
            for m, k in self._atom_d[a].items():
                out[m] = out.get(m, 0) + da * k
        return out

    def _d_mono(self, mono: Mono) -> Dict[Mono, Any]:
        if mono in self._dmono_cache:
            return self._dmono_cache[mono]
        out: Dict[Mono, Any] = {}
        for pos, i in enumerate(mono):
            s = self._structure[i]
            if not s:
                continue
            left, right = mono[:pos], mono[pos + 1:]
            sgn = -1 if pos % 2 else 1
            for m2, c in s.items():
                s1, m = _wedge_mono(left, m2)
                if not s1:
                    continue
                s2, m = _wedge_mono(m, right)
                if not s2:
                    continue
                out[m] = out.get(m, 0) + sgn * s1 * s2 * c
        out = {m: _clean(c) for m, c in out.items()}
        out = {m: c for m, c in out.items() if c != 0}
        self._dmono_cache[mono] = out
        return out

    def check_d_squared(self):
        bad = []
        states = []
        for i, n in enumerate(self.names):
            dd = d(d(self.basis(n)))
            st = dd.is_zero()
            states.append(st)
            if not st.is_zero:
                bad.append((n, st.verdict.value))
        for a in self._atom_d:
            dd = d(self.d_atom(a))
            st = dd.is_zero()
            states.append(st)
            if not st.is_zero:
                bad.append((str(a), st.verdict.value))
        self.d2_transcript = {"checked": len(states), "failures": bad}
        nonzero = [b for b in bad if b[1] == Verdict.NONZERO.value]
        if nonzero:
            raise FormError(f"structure equations violate d^2 = 0 for {nonzero}")
        return TriState.combine(states, "d^2 = 0")

    def monomials(self, degree: int, allowed: Iterable[int] = None) -> List[Mono]:
        idx = sorted(allowed) if allowed is not None else range(self.dim)
        return [tuple(c) for c in itertools.combinations(idx, degree)]

    def mono_name(self, mono: Mono) -> str:
        return "^".join(self.names[i] for i in mono) if mono else "1"

    def __repr__(self):
        return f"CoframeSpace({self.names})"


def _wedge_mono_list(idx: Sequence[int]):
    sign, mono = 1, ()
    for i in idx:
        s, mono = _wedge_mono(mono, (i,))
        if not s:
            return 0, None
        sign *= s
    return sign, mono


class DifferentialForm:
    """Homogeneous differential form on a :class:`CoframeSpace`."""

    __slots__ = ("space", "terms", "degree")

    def __init__(self, space: CoframeSpace, terms: Mapping[Mono, Any], degree: int):
        self.space = space
        self.degree = degree
        clean = {}
        for m, c in terms.items():
            if len(m) != degree:
                raise FormError(f"monomial {m} does not have degree {degree}")
            c = _clean(c)
            if c != 0:
                clean[tuple(m)] = c
        self.terms: Dict[Mono, Any] = clean

    # -- algebra ---------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, DifferentialForm):
            raise TypeError("expected a DifferentialForm")
        if other.space is not self.space:
            raise CoframeMismatchError("forms live on different coframes")

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            other = self.space.scalar(other)
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if other.degree != self.degree:
            raise FormError(f"cannot add forms of degree {self.degree} and {other.degree}")
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t.get(m, 0) + c
        return DifferentialForm(self.space, t, self.degree)

    __radd__ = __add__

    def __neg__(self):
        return DifferentialForm(self.space, {m: -c for m, c in self.terms.items()}, self.degree)

    def __sub__(self, other):
        if not isinstance(other, DifferentialForm):
            other = self.space.scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, DifferentialForm):
            return wedge(self, other)
        other = sp.sympify(other)
        return DifferentialForm(self.space, {m: c * other for m, c in self.terms.items()}, self.degree)

    def __rmul__(self, other):
        other = sp.sympify(other)
        return DifferentialForm(self.space, {m: other * c for m, c in self.terms.items()}, self.degree)

    def __truediv__(self, other):
        return self * (1 / sp.sympify(other))

    def __xor__(self, other):
        return wedge(self, other)

    def __pow__(self, k: int):
        out = self.space.scalar(1)
        for _ in range(int(k)):
            out = wedge(out, self)
        return out

    def d(self):
        return d(self)

    def wedge(self, other):
        return wedge(self, other)

    # -- inspection ------------------------------------------------------
    def coefficient(self, *names) -> sp.Expr:
        idx = [self.space._idx(n) for n in names]
        sign, mono = _wedge_mono_list(idx)
        if not sign:
            return sp.Integer(0)
        return sign * self.terms.get(mono, sp.Integer(0))

    def map_coefficients(self, fn):
        return DifferentialForm(self.space, {m: fn(c) for m, c in self.terms.items()}, self.degree)

    def subs(self, *args, **kw):
        return self.map_coefficients(lambda c: sp.sympify(c).subs(*args, **kw))

    def xreplace(self, rule):
        return self.map_coefficients(lambda c: sp.sympify(c).xreplace(rule))

    def canonical(self):
        return self.map_coefficients(canonicalize)

    def is_zero(self, policy: str = "exact-then-numeric", config: SamplingConfig = None,
                ranges=None) -> TriState:
        states = []
        for m in sorted(self.terms):
            st = is_zero(self.terms[m], policy=policy, config=config, ranges=ranges,
                         on_missing="unknown")
            st.transcript["monomial"] = self.space.mono_name(m)
            states.append(st)
        if not states:
            return TriState(Verdict.ZERO, {"path": "exact", "canonical": "0"})
        return TriState.combine(states, "coefficients")

    def equals(self, other, policy: str = "exact") -> bool:
        return (self - other).is_zero(policy=policy).is_zero

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            if other == 0:
                return not self.canonical().terms
            return NotImplemented
        if other.space is not self.space:
            return False
        return not (self - other).canonical().terms

    def __hash__(self):
        return id(self)

    def __bool__(self):
        return bool(self.terms)

    def free_symbols(self):
        out = set()
        for c in self.terms.values():
            out |= sp.sympify(c).free_symbols
        return out

    # -- output ----------------------------------------------------------
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            c = self.terms[m]
            mono = self.space.mono_name(m)
            parts.append(f"({to_text(c)})" + ("" if not m else "*" + mono))
        return " + ".join(parts)

    def to_json(self):
        return {"degree": self.degree,
                "terms": [{"monomial": [self.space.names[i] for i in m],
                           "coeff": to_text(self.terms[m]),
                           "tree": expr_to_json(self.terms[m])}
                          for m in sorted(self.terms)]}

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms):
            mono = r" \wedge ".join(_latex_name(self.space.names[i]) for i in m)
            parts.append(r"\left(" + sp.latex(self.terms[m]) + r"\right)" + (" " + mono if m else ""))
        return " + ".join(parts)

    def __repr__(self):
        return f"<{self.degree}-form {self.to_text()}>"


def _latex_name(n: str) -> str:
    if n.startswith("d") and len(n) > 1:
        return r"d" + sp.latex(sp.Symbol(n[1:]))
    return sp.latex(sp.Symbol(n))


# ---------------------------------------------------------------------------
# operations

def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if not isinstance(b, DifferentialForm):
        return a * b
    a._check(b)
    out: Dict[Mono, Any] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            s, m = _wedge_mono(ma, mb)
            if s:
                out[m] = out.get(m, 0) + s * ca * cb
    return DifferentialForm(a.space, out, a.degree + b.degree)


def wedge_all(forms: Sequence[DifferentialForm], space: CoframeSpace = None) -> DifferentialForm:
    forms = list(forms)
    if not forms:
        return space.scalar(1)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def d(f: DifferentialForm) -> DifferentialForm:
    """Exterior derivative via coefficient partials and structure rules."""
    sp_ = f.space
    out: Dict[Mono, Any] = {}
    for m, c in f.terms.items():
        for m1, k in sp_._d_scalar(c).items():
            s, mm = _wedge_mono(m1, m)
            if s:
                out[mm] = out.get(mm, 0) + s * k
        for mm, k in sp_._d_mono(m).items():
            out[mm] = out.get(mm, 0) + c * k
    return DifferentialForm(sp_, out, f.degree + 1)


class VectorField:
    """Vector field given by its values on the basis 1-forms (dual components)."""

    def __init__(self, space: CoframeSpace, components: Mapping):
        self.space = space
        comps = {}
        for k, c in components.items():
            c = _clean(c)
            if c != 0:
                comps[space._idx(k)] = c
        self.components = comps

    @classmethod
    def from_coordinates(cls, space: CoframeSpace, coord_components: Mapping):
        """Field ``Σ X^a ∂/∂a`` given on atoms, converted using the expansions."""
        comps = {}
        for i in range(space.dim):
            if i not in space.expansion:
                raise NotCoordinateExactError(
                    f"basis element {space.names[i]} has no expansion in atom differentials")
            comps[i] = sum((c * sp.sympify(coord_components.get(a, 0))
                            for a, c in space.expansion[i].items()), sp.Integer(0))
        return cls(space, comps)

    def __call__(self, f: DifferentialForm):
        return contract(self, f)

    def component(self, name) -> sp.Expr:
        return self.components.get(self.space._idx(name), sp.Integer(0))

    def on_atom(self, a: sp.Symbol) -> sp.Expr:
        """Value of ``d(atom)`` on the field."""
        return contract(self, self.space.d_atom(a)).terms.get((), sp.Integer(0))

    def __add__(self, other):
        c = dict(self.components)
        for k, v in other.components.items():
            c[k] = c.get(k, 0) + v
        return VectorField(self.space, c)

    def __rmul__(self, s):
        return VectorField(self.space, {k: s * v for k, v in self.components.items()})

    def __neg__(self):
        return VectorField(self.space, {k: -v for k, v in self.components.items()})

    def map_coefficients(self, fn):
        return VectorField(self.space, {k: fn(v) for k, v in self.components.items()})

    def __repr__(self):
        body = ", ".join(f"{self.space.names[k]}: {to_text(v)}"
                         for k, v in sorted(self.components.items()))
        return f"VectorField({body})"


def contract(v: VectorField, f: DifferentialForm) -> DifferentialForm:
    """Interior product ``v ⌟ f`` (antiderivation of degree −1)."""
    if v.space is not f.space:
        raise CoframeMismatchError("vector field and form on different coframes")
    if f.degree == 0:
        return f.space.zero(0) if f.terms else f.space.zero(0)
    out: Dict[Mono, Any] = {}
    for m, c in f.terms.items():
        for pos, i in enumerate(m):
            vi = v.components.get(i)
            if vi is None:
                continue
            mm = m[:pos] + m[pos + 1:]
            out[mm] = out.get(mm, 0) + (-1 if pos % 2 else 1) * vi * c
    return DifferentialForm(f.space, out, f.degree - 1)


def lie_derivative(v: VectorField, f: DifferentialForm) -> DifferentialForm:
    """Cartan formula ``L_v f = v⌟df + d(v⌟f)``."""
    out = contract(v, d(f))
    if f.degree > 0:
        out = out + d(contract(v, f))
    return out


# ---------------------------------------------------------------------------
# pullback

def pullback(f: DifferentialForm, source: CoframeSpace, atom_map: Mapping = None,
             basis_images: Mapping = None) -> DifferentialForm:
    """Pull ``f`` back to ``source``.

    With ``atom_map`` (target atom -> expression on the source) each target
    basis element ``Σ c_j d(a_j)`` maps to ``Σ m(c_j) d(m(a_j))``; this needs
    an expansion of every basis element in atom differentials (coordinate
    exact coframes always have one).  With ``basis_images`` (target basis name
    -> source 1-form) the coframe is mapped directly and ``atom_map`` only
    transports coefficients.
    """
    tgt = f.space
    atom_map = {k: sp.sympify(v) for k, v in (atom_map or {}).items()}

    def m(c):
        return sp.sympify(c).xreplace(atom_map) if atom_map else sp.sympify(c)

    images: Dict[int, DifferentialForm] = {}
    if basis_images is not None:
        for k, img in basis_images.items():
            if not isinstance(img, DifferentialForm) or img.space is not source or img.degree != 1:
                raise FormError(f"image of {k} must be a 1-form on the source space")
            images[tgt._idx(k)] = img
    needed = {i for mono in f.terms for i in mono}
    for i in sorted(needed):
        if i in images:
            continue
        if basis_images is not None:
            raise FormError(f"no image given for basis element {tgt.names[i]}")
        if i not in tgt.expansion:
            raise NotCoordinateExactError(
                f"target basis element {tgt.names[i]} is not expressed in coordinates")
        img = source.zero(1)
        for a, c in tgt.expansion[i].items():
            img = img + m(c) * d(source.scalar(m(a)))
        images[i] = img
    out = source.zero(f.degree)
    for mono, c in f.terms.items():
        term = source.scalar(m(c))
        for i in mono:
            term = wedge(term, images[i])
        out = out + term
    return out


# ---------------------------------------------------------------------------
# ideals

def _is_const(c) -> bool:
    return not sp.sympify(c).free_symbols


def _nonzero_entry(c) -> bool:
    c = canonicalize(c)
    if c == 0:
        return False
    if c.is_Number:
        return True
    st = is_zero(c, on_missing="unknown")
    return not st.is_zero


class ExteriorIdeal:
    """Finitely generated ideal with a triangular degree-1 presentation.

    The 1-form generators are brought to reduced echelon form, each solved for
    a distinguished basis element (its *lead*).  Reduction substitutes the
    leads and then eliminates, by exact linear algebra over the coefficient
    field, the span of (higher generators) ∧ (monomials) in each degree.
    """

    def __init__(self, space: CoframeSpace, generators: Sequence[DifferentialForm],
                 kind: str = "algebraic", leads: Sequence[str] = None, label: str = ""):
        if kind not in ("algebraic", "differential"):
            raise FormError("kind must be 'algebraic' or 'differential'")
        self.space = space
        self.kind = kind
        self.label = label
        gens = [g for g in generators if g.terms]
        for g in gens:
            if g.space is not space:
                raise CoframeMismatchError("generator on a different coframe")
        self.generators = gens
        self._lead_pref = [space._idx(l) for l in (leads or [])]
        self._triangularize([g for g in gens if g.degree == 1])
        higher = [g for g in gens if g.degree >= 2]
        if kind == "differential":
            extra = []
            for g in gens:
                dg = d(g)
                if dg.terms:
                    extra.append(dg)
            higher = higher + extra
        self._higher_raw = higher
        self._higher = None
        self._rref_cache: Dict[int, Any] = {}
        self._subst_cache: Dict[Mono, Dict[Mono, Any]] = {}

    # -- setup -----------------------------------------------------------
    def _triangularize(self, ones: List[DifferentialForm]):
        sp_ = self.space
        rows = [{m[0]: c for m, c in g.terms.items()} for g in ones]
        leads: List[int] = []
        solved: List[Dict[int, Any]] = []
        pref = self._lead_pref
        while rows:
            # pick a row and a pivot: constant coefficient preferred
            best = None
            for ri, r in enumerate(rows):
                cand = [k for k in r if r[k] != 0]
                if not cand:
                    continue
                order = sorted(cand, key=lambda k: (k not in pref, pref.index(k) if k in pref else 0,
                                                    not _is_const(r[k]), -k))
                for k in order:
                    if _nonzero_entry(r[k]):
                        score = (k not in pref, not _is_const(r[k]))
                        if best is None or score < best[0]:
                            best = (score, ri, k)
                        break
            if best is None:
                break
            _, ri, k = best
            r = rows.pop(ri)
            piv = r[k]
            r = {j: canonicalize(c / piv) for j, c in r.items()}
            r = {j: c for j, c in r.items() if c != 0}
            # eliminate k from other rows and from previously solved rows
            def elim(row):
                if k not in row:
                    return row
                f = row[k]
                new = dict(row)
                for j, c in r.items():
                    new[j] = new.get(j, 0) - f * c
                new = {j: canonicalize(c) for j, c in new.items()}
                return {j: c for j, c in new.items() if c != 0}
            rows = [elim(x) for x in rows]
            solved = [elim(x) for x in solved]
            for x in rows + solved:
                x.pop(k, None)
            solved.append(r)
            leads.append(k)
        # express each lead through non-leads
        lead_set = set(leads)
        self.leads = leads
        self.lead_names = [sp_.names[k] for k in leads]
        self.substitution: Dict[int, Dict[int, Any]] = {}
        for k, r in zip(leads, solved):
            for j in r:
                if j != k and j in lead_set:
                    raise NonTriangularError("degree-1 presentation is not triangular")
            self.substitution[k] = {j: -c for j, c in r.items() if j != k}
        self.one_forms = [DifferentialForm(sp_, {(k,): 1, **{(j,): -c for j, c in s.items()}}, 1)
                          for k, s in self.substitution.items()]
        self.non_leads = [i for i in range(sp_.dim) if i not in lead_set]

    def _subst_mono(self, mono: Mono) -> Dict[Mono, Any]:
        if mono in self._subst_cache:
            return self._subst_cache[mono]
        acc: Dict[Mono, Any] = {(): sp.Integer(1)}
        for i in mono:
            img = {(i,): sp.Integer(1)} if i not in self.substitution else \
                {(j,): c for j, c in self.substitution[i].items()}
            new: Dict[Mono, Any] = {}
            for m1, c1 in acc.items():
                for m2, c2 in img.items():
                    s, m = _wedge_mono(m1, m2)
                    if s:
                        new[m] = new.get(m, 0) + s * c1 * c2
            acc = new
            if not acc:
                break
        acc = {m: _clean(c) for m, c in acc.items()}
        acc = {m: c for m, c in acc.items() if c != 0}
        self._subst_cache[mono] = acc
        return acc

    def substitute_leads(self, f: DifferentialForm) -> DifferentialForm:
        out: Dict[Mono, Any] = {}
        for m, c in f.terms.items():
            for m2, k in self._subst_mono(m).items():
                out[m2] = out.get(m2, 0) + c * k
        return DifferentialForm(self.space, out, f.degree)

    @property
    def higher(self) -> List[DifferentialForm]:
        if self._higher is None:
            hs = []
            for h in self._higher_raw:
                r = self.substitute_leads(h).canonical()
                if r.terms:
                    hs.append(r)
            self._higher = hs
        return self._higher

    def _column_key(self, mono: Mono):
        return tuple(-i for i in sorted(mono, reverse=True))

    def _rref(self, degree: int):
        if degree in self._rref_cache:
            return self._rref_cache[degree]
        rows = []
        for h in self.higher:
            q = degree - h.degree
            if q < 0:
                continue
            for m in self.space.monomials(q, self.non_leads):
                w: Dict[Mono, Any] = {}
                for mh, c in h.terms.items():
                    s, mm = _wedge_mono(mh, m)
                    if s:
                        w[mm] = w.get(mm, 0) + s * c
                w = {k: v for k, v in w.items() if v != 0}
                if w:
                    rows.append(w)
        cols = sorted({k for r in rows for k in r}, key=self._column_key)
        rows.sort(key=lambda r: (not all(_is_const(v) for v in r.values()), len(r)))
        pivots: List[Tuple[Mono, Dict[Mono, Any]]] = []
        for col in cols:
            pick = None
            for ri, r in enumerate(rows):
                c = r.get(col)
                if c is None:
                    continue
                if _is_const(c) and c != 0:
                    pick = ri
                    break
                if pick is None and _nonzero_entry(c):
                    pick = ri
            if pick is None:
                continue
            r = rows.pop(pick)
            piv = r[col]
            r = {k: canonicalize(v / piv) for k, v in r.items()}
            r = {k: v for k, v in r.items() if v != 0}

            def elim(x):
                f = x.get(col)
                if f is None:
                    return x
                y = dict(x)
                for k, v in r.items():
                    y[k] = y.get(k, 0) - f * v
                y.pop(col, None)
                y = {k: canonicalize(v) for k, v in y.items()}
                return {k: v for k, v in y.items() if v != 0}

            rows = [elim(x) for x in rows]
            rows = [x for x in rows if x]
            pivots = [(pc, elim(pr) if pc != col else pr) for pc, pr in pivots]
            pivots.append((col, r))
        self._rref_cache[degree] = pivots
        return pivots

    # -- reduction ---------------------------------------------------------
    def reduce(self, f: DifferentialForm) -> DifferentialForm:
        if f.space is not self.space:
            raise CoframeMismatchError("form and ideal on different coframes")
        g = self.substitute_leads(f)
        if not g.terms or not self.higher:
            return g
        t = dict(g.terms)
        for col, row in self._rref(f.degree):
            c = t.get(col)
            if c is None:
                continue
            for k, v in row.items():
                t[k] = t.get(k, 0) - c * v
            t.pop(col, None)
        return DifferentialForm(self.space, t, f.degree)

    def contains(self, f: DifferentialForm, policy: str = "exact-then-numeric",
                 config: SamplingConfig = None, ranges=None) -> TriState:
        r = self.reduce(f)
        st = r.is_zero(policy=policy, config=config, ranges=ranges)
        st.transcript["ideal"] = self.label or "ideal"
        st.transcript["remainder"] = r.canonical().to_text() if r.terms else "0"
        return st

    def contains_sampled(self, f: DifferentialForm, config: SamplingConfig = None,
                         ranges=None) -> TriState:
        """Pointwise membership by numeric sampling.

        At each sample point the coefficient vector of ``f`` is projected
        (Gram-Schmidt at ``config.dps`` digits) onto the span of
        ``generator ∧ monomial`` in degree ``f.degree``; the relative residual
        is compared with the zero / nonzero thresholds as in scalar sampling.
        """
        import mpmath
        from . import scalar as _scalar
        cfg = config or _scalar.DEFAULT_SAMPLING
        if f.space is not self.space:
            raise CoframeMismatchError("form and ideal on different coframes")
        S = self.space
        p = f.degree
        cols = []
        for g in self.generators + list(self._higher_raw):
            if g.degree > p:
                continue
            for m in S.monomials(p - g.degree):
                w = wedge(g, DifferentialForm(S, {m: 1}, p - g.degree))
                if w.terms:
                    cols.append(w.terms)
        rows = S.monomials(p)
        exprs = [f.terms.get(m, 0) for m in rows] + [c.get(m, 0) for c in cols for m in rows]
        symbols = sorted(set().union(*[sp.sympify(e).free_symbols for e in exprs]) if exprs else set(),
                         key=lambda s_: s_.name)
        _scalar._check_evaluable(sp.Add(*[sp.sympify(e) for e in exprs]) if exprs else sp.Integer(0))
        rng = random.Random(cfg.seed)
        pts, worst, got, attempts = [], 0.0, 0, 0
        with mpmath.workdps(cfg.dps):
            fn = sp.lambdify(symbols, exprs, modules="mpmath")
            nr = len(rows)
            while got < cfg.samples:
                attempts += 1
                if attempts > cfg.samples * cfg.max_attempts:
                    return TriState(Verdict.UNKNOWN, {"path": "numeric-membership",
                                                      "reason": "too many singular sample points",
                                                      "config": cfg.as_dict()})
                point = _scalar._sample_point(symbols, cfg, rng, ranges)
                try:
                    vals = fn(*[mpmath.mpf(point[s_]) for s_ in symbols])
                except (ZeroDivisionError, ValueError, OverflowError, TypeError):
                    continue
                vals = [mpmath.mpmathify(v) for v in vals]
                if not all(mpmath.isfinite(v) for v in vals):
                    continue
                b = vals[:nr]
                basis = []
                tol = mpmath.mpf(10) ** (-(cfg.dps * 4) // 5)
                for k in range(len(cols)):
                    v = vals[nr * (k + 1): nr * (k + 2)]
                    scale = mpmath.sqrt(sum(x_ * x_ for x_ in v))
                    if scale == 0:
                        continue
                    for _ in range(2):
                        for q in basis:
                            c = sum(a_ * b_ for a_, b_ in zip(q, v))
                            v = [a_ - c * b_ for a_, b_ in zip(v, q)]
                    nv = mpmath.sqrt(sum(x_ * x_ for x_ in v))
                    if nv > tol * scale:
                        basis.append([x_ / nv for x_ in v])
                r = list(b)
                for _ in range(2):
                    for q in basis:
                        c = sum(a_ * b_ for a_, b_ in zip(q, r))
                        r = [a_ - c * b_ for a_, b_ in zip(r, q)]
                nb = mpmath.sqrt(sum(x_ * x_ for x_ in b))
                rel = mpmath.mpf(0) if nb == 0 else mpmath.sqrt(sum(x_ * x_ for x_ in r)) / nb
                got += 1
                worst = max(worst, float(rel))
                pts.append({"point": {s_.name: repr(point[s_]) for s_ in symbols},
                            "relative": mpmath.nstr(rel, 5), "rank": len(basis)})
                if rel > cfg.nonzero_tol:
                    return TriState(Verdict.NONZERO, {"path": "numeric-membership",
                                                      "config": cfg.as_dict(), "points": pts,
                                                      "ideal": self.label or "ideal"})
        verdict = Verdict.ZERO if worst < cfg.zero_tol else Verdict.UNKNOWN
        return TriState(verdict, {"path": "numeric-membership", "config": cfg.as_dict(),
                                  "points": pts, "max_relative": worst,
                                  "ideal": self.label or "ideal"})

    def check_closure(self) -> TriState:
        """Transcript for ``d(generator) ∈ ideal`` (differential ideals)."""
        return TriState.combine([self.contains(d(g)) for g in self.generators], "closure")

    def extend(self, more: Sequence[DifferentialForm], kind: str = None, label: str = None):
        return ExteriorIdeal(self.space, self.generators + list(more), kind or self.kind,
                             leads=[self.space.names[k] for k in self._lead_pref],
                             label=label or self.label)

    def __repr__(self):
        return f"ExteriorIdeal({self.label or ''} leads={self.lead_names}, higher={len(self._higher_raw)})"


def reduce_mod(f: DifferentialForm, ideal: ExteriorIdeal) -> DifferentialForm:
    return ideal.reduce(f)


def in_ideal(f: DifferentialForm, ideal: ExteriorIdeal, policy: str = "exact-then-numeric",
             config: SamplingConfig = None, ranges=None) -> TriState:
    return ideal.contains(f, policy=policy, config=config, ranges=ranges)


def homotopy(f: DifferentialForm, center: Mapping = None):
    """Radial homotopy primitive of a closed form on a coordinate coframe.

    Returns ``h`` with ``dh = f`` (for closed ``f``) computed as
    ``∫_0^1 t^{k-1} (X ⌟ f)(c + t(x − c)) dt`` with ``X`` the radial field
    about ``center``; ``None`` if an integral leaves closed form.
    """
    S = f.space
    if not S.is_coordinate_exact():
        raise NotCoordinateExactError("homotopy operator needs a coordinate coframe")
    if f.degree == 0:
        raise FormError("homotopy operator acts on forms of positive degree")
    center = {a: sp.sympify(v) for a, v in (center or {}).items()}
    t = sp.Dummy("t")
    comps = {}
    for a in S.atoms:
        c = center.get(a, 0)
        comps[a] = a - c
    X = VectorField.from_coordinates(S, comps)
    scale = {a: center.get(a, 0) + t * (a - center.get(a, 0)) for a in S.atoms}
    g = contract(X, f.xreplace(scale))
    out = {}
    for m, c in g.terms.items():
        integrand = sp.expand(t ** (f.degree - 1) * c)
        val = sp.integrate(integrand, (t, 0, 1), conds="none")
        if val.has(sp.Integral):
            return None
        out[m] = val
    return DifferentialForm(S, out, f.degree - 1)
