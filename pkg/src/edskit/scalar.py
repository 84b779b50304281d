"""Scalar kernel: symbolic scalars, function symbols, canonical form, zero tests.

Scalars are plain SymPy expressions.  On top of them this module adds

* a registry of *function symbols* (opaque functions with derivative rules
  and optional mpmath evaluators),
* a bounded rewrite-based ``canonicalize``,
* a tri-state zero test (exact rewrite path, then seeded high-precision
  numeric sampling),
* a small infix parser, a printer for the same grammar, and a JSON tree form.

Grammar accepted by :func:`parse`::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := ('+' | '-') factor | power
    power  := atom ('^' factor)?
    atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'

``pi`` is the circle constant; numbers are integers or decimals (decimals
are converted to exact rationals).
"""
from __future__ import annotations

import contextlib
import dataclasses
import random
import re
from enum import Enum
from typing import Any, Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import mpmath
import sympy as sp

__all__ = [
    "ScalarError", "ParseError", "UnknownIdentifierError", "ArityError",
    "UnregisteredDerivativeError", "MissingEvaluatorError", "EmptySamplingDomainError",
    "FunctionRegistry", "REGISTRY", "function_symbol", "Verdict", "TriState",
    "SamplingConfig", "canonicalize", "diff", "is_zero", "parse", "to_text",
    "to_json", "from_json", "numeric_value", "display_name", "sampling_defaults",
]


# ---------------------------------------------------------------------------
# errors

class ScalarError(Exception):
    """Base class for scalar-kernel errors."""


class ParseError(ScalarError):
    """Malformed expression text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


class UnregisteredDerivativeError(ScalarError):
    pass


class MissingEvaluatorError(ScalarError):
    pass


class EmptySamplingDomainError(ScalarError):
    pass


# ---------------------------------------------------------------------------
# function symbols

_BUILTINS: Dict[str, Any] = {
    "sin": sp.sin, "cos": sp.cos, "tan": sp.tan, "exp": sp.exp, "log": sp.log,
    "sqrt": sp.sqrt, "atan": sp.atan, "sinh": sp.sinh, "cosh": sp.cosh,
    "tanh": sp.tanh, "sech": sp.sech,
}


@dataclasses.dataclass
class _FunctionInfo:
    name: str
    arity: int
    cls: Any
    rules: Dict[int, Any]            # argindex (1-based) -> derivative rule
    evaluator: Optional[Callable]
    display: str


class FunctionRegistry:
    """Registry of opaque function symbols.

    A derivative rule for an argument slot is either the name of another
    registered function symbol (``F -> f``) or a callable building a closed
    expression from the argument list.  If no rule is given, the derivative
    symbol ``<name>p`` is registered on demand (displayed with a prime), so
    rules close under repeated differentiation.
    """

    def __init__(self):
        self._info: Dict[str, _FunctionInfo] = {}

    def __contains__(self, name: str) -> bool:
        return name in self._info

    def names(self) -> List[str]:
        return sorted(self._info)

    def get(self, name: str):
        return self._info[name].cls

    def info(self, name: str) -> _FunctionInfo:
        return self._info[name]

    def register(self, name: str, arity: int = 1, derivative: Any = None,
                 evaluator: Optional[Callable] = None, display: Optional[str] = None):
        """Register (or update) a function symbol and return its SymPy class."""
        if name in _BUILTINS:
            raise ScalarError(f"{name!r} is a built-in function")
        rules: Dict[int, Any] = {}
        if derivative is not None:
            if arity == 1 and not isinstance(derivative, (dict, list, tuple)):
                rules[1] = derivative
            elif isinstance(derivative, dict):
                rules.update({int(k): v for k, v in derivative.items()})
            else:
                rules.update({i + 1: v for i, v in enumerate(derivative)})
        if name in self._info:
            info = self._info[name]
            if info.arity != arity:
                raise ScalarError(f"{name!r} already registered with arity {info.arity}")
            info.rules.update(rules)
            if evaluator is not None:
                info.evaluator = evaluator
                info.cls._imp_ = staticmethod(evaluator)
            if display is not None:
                info.display = display
            return info.cls
        registry = self

        def fdiff(self_, argindex=1):
            return registry._derivative(name, argindex, self_.args)

        attrs: Dict[str, Any] = {"nargs": arity, "fdiff": fdiff}
        if evaluator is not None:
            attrs["_imp_"] = staticmethod(evaluator)
        cls = type(name, (sp.Function,), attrs)
        self._info[name] = _FunctionInfo(name, arity, cls, rules, evaluator, display or name)
        return cls

    def _derivative(self, name: str, argindex: int, args):
        info = self._info[name]
        rule = info.rules.get(argindex)
        if rule is None:
            if info.arity != 1:
                raise UnregisteredDerivativeError(
                    f"no derivative rule for slot {argindex} of {name}")
            dname = name + "p"
            if dname not in self._info:
                self.register(dname, 1, display=info.display + "′")
            info.rules[1] = dname
            rule = dname
        if rule is False:
            raise UnregisteredDerivativeError(f"{name} has no derivative rule")
        if isinstance(rule, str):
            if rule not in self._info:
                self.register(rule, info.arity)
            return self._info[rule].cls(*args)
        return sp.sympify(rule(*args))

    def lookup(self, name: str):
        if name in _BUILTINS:
            return _BUILTINS[name]
        if name in self._info:
            return self._info[name].cls
        return None

    def arity(self, name: str) -> int:
        if name in _BUILTINS:
            return 1
        return self._info[name].arity


REGISTRY = FunctionRegistry()


def function_symbol(name: str, arity: int = 1, derivative: Any = None,
                    evaluator: Optional[Callable] = None, display: Optional[str] = None):
    """Register a function symbol in the default registry and return its class."""
    return REGISTRY.register(name, arity, derivative, evaluator, display)


def display_name(func_name: str) -> str:
    if func_name in REGISTRY:
        return REGISTRY.info(func_name).display
    return func_name


def _opaque_functions(e: sp.Expr):
    """Applications of functions that are not SymPy built-ins."""
    out = set()
    for f in e.atoms(sp.Function):
        if isinstance(f, sp.core.function.AppliedUndef) or type(f).__name__ in REGISTRY:
            out.add(f)
    return out


# ---------------------------------------------------------------------------
# canonical form

def _halve(arg):
    """If arg = m*t with m an even integer, return t*m/2, else None."""
    coeff, rest = arg.as_coeff_Mul()
    if coeff.is_Integer and coeff % 2 == 0 and coeff != 0:
        return (coeff / 2) * rest
    if arg.is_Add:
        # sin(2a + 2b) style arguments: every coefficient even
        terms = [t.as_coeff_Mul() for t in arg.args]
        if all(c.is_Integer and c % 2 == 0 for c, _ in terms):
            return sp.Add(*[(c / 2) * r for c, r in terms])
    return None


def _double_angle(e):
    def sin_rule(f):
        h = _halve(f.args[0])
        return 2 * sp.sin(h) * sp.cos(h) if h is not None else f

    def cos_rule(f):
        h = _halve(f.args[0])
        return 1 - 2 * sp.sin(h) ** 2 if h is not None else f

    prev = None
    while prev != e:
        prev = e
        e = e.replace(lambda x: isinstance(x, sp.sin) and _halve(x.args[0]) is not None, sin_rule)
        e = e.replace(lambda x: isinstance(x, sp.cos) and _halve(x.args[0]) is not None, cos_rule)
    return e


def _even_power_rules(e):
    def is_target(x):
        return (x.is_Pow and x.exp.is_Integer and x.exp >= 2
                and isinstance(x.base, (sp.cos, sp.tanh)))

    def rule(x):
        k = int(x.exp)
        b = x.base
        t = b.args[0]
        if isinstance(b, sp.cos):
            repl = 1 - sp.sin(t) ** 2
        else:
            repl = 1 - sp.sech(t) ** 2
        return repl ** (k // 2) * b ** (k % 2)

    return e.replace(is_target, rule)


def _poly_pass(e):
    e = _double_angle(e)
    e = sp.expand(e, power_exp=False)
    e = _even_power_rules(e)
    e = sp.expand(e, power_exp=False)
    e = sp.powsimp(e, combine="exp")
    e = sp.expand(e, power_exp=False)
    return e


def canonicalize(e: Any) -> sp.Expr:
    """Bounded canonical form.

    Applies double-angle rewrites, distributes, replaces ``cos^2`` by
    ``1 - sin^2`` and ``tanh^2`` by ``1 - sech^2``, merges exponentials, and
    for rational expressions cancels common factors, iterating until the
    result no longer changes.
    """
    e = sp.sympify(e)
    for _ in range(12):
        prev = e
        e = _poly_pass(e)
        num, den = sp.fraction(sp.together(e))
        if den == 1:
            e = _poly_pass(num)
        else:
            num = _poly_pass(num)
            den = _poly_pass(den)
            if num == 0:
                e = sp.Integer(0)
            else:
                q = sp.cancel(num / den)
                qn, qd = sp.fraction(q)
                qn = _poly_pass(qn)
                qd = _poly_pass(qd)
                e = qn / qd if qd != 1 else qn
                e = sp.expand(e, power_exp=False) if qd == 1 else e
        if e == prev:
            break
    return e


def diff(e: Any, c: sp.Symbol, canonical: bool = True) -> sp.Expr:
    """Partial derivative in the coordinate ``c``; parameters differentiate to 0."""
    e = sp.sympify(e)
    r = sp.diff(e, c)
    if canonical:
        r = canonicalize(r)
    return r


# ---------------------------------------------------------------------------
# tri-state zero test

class Verdict(str, Enum):
    ZERO = "Zero"
    NONZERO = "NonZero"
    UNKNOWN = "Unknown"


@dataclasses.dataclass
class TriState:
    """Outcome of a zero test together with the transcript that decided it."""

    verdict: Verdict
    transcript: Dict[str, Any] = dataclasses.field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return self.verdict is Verdict.ZERO

    @property
    def is_nonzero(self) -> bool:
        return self.verdict is Verdict.NONZERO

    @property
    def is_unknown(self) -> bool:
        return self.verdict is Verdict.UNKNOWN

    def __bool__(self):
        raise TypeError("TriState has no truth value; use .is_zero / .is_nonzero")

    def __repr__(self):
        return f"TriState({self.verdict.value})"

    @staticmethod
    def combine(states: Sequence["TriState"], label: str = "all") -> "TriState":
        """Zero iff all are Zero; NonZero if any is NonZero; else Unknown."""
        parts = [s.transcript for s in states]
        if any(s.is_nonzero for s in states):
            v = Verdict.NONZERO
        elif all(s.is_zero for s in states):
            v = Verdict.ZERO
        else:
            v = Verdict.UNKNOWN
        return TriState(v, {"path": f"combine:{label}", "parts": parts})


@dataclasses.dataclass(frozen=True)
class SamplingConfig:
    samples: int = 32
    dps: int = 50
    seed: int = 0
    zero_tol: float = 1e-30
    nonzero_tol: float = 1e-10
    positive_range: Tuple[float, float] = (0.5, 2.0)
    signed_range: Tuple[float, float] = (0.25, 1.5)
    max_attempts: int = 20

    def as_dict(self):
        return {"samples": self.samples, "dps": self.dps, "seed": self.seed,
                "zero_tol": self.zero_tol, "nonzero_tol": self.nonzero_tol,
                "positive_range": list(self.positive_range),
                "signed_range": list(self.signed_range)}


DEFAULT_SAMPLING = SamplingConfig()


@contextlib.contextmanager
def sampling_defaults(cfg: SamplingConfig):
    """Temporarily replace the configuration used when none is passed."""
    global DEFAULT_SAMPLING
    old = DEFAULT_SAMPLING
    DEFAULT_SAMPLING = cfg
    try:
        yield cfg
    finally:
        DEFAULT_SAMPLING = old


def _terms(e: sp.Expr) -> List[sp.Expr]:
    num, _ = sp.fraction(sp.together(e))
    num = sp.expand(num, power_exp=False)
    return list(sp.Add.make_args(num)), num


def _check_evaluable(e: sp.Expr):
    missing = []
    for f in _opaque_functions(e):
        if getattr(type(f), "_imp_", None) is None:
            missing.append(str(f.func))
    if missing:
        raise MissingEvaluatorError("no numeric evaluator for: " + ", ".join(sorted(set(missing))))


def _sample_point(symbols, cfg: SamplingConfig, rng: random.Random, ranges):
    point = {}
    for s in symbols:
        if ranges and s in ranges:
            lo, hi = ranges[s]
            if not lo < hi:
                raise EmptySamplingDomainError(f"empty sampling range for {s}")
            point[s] = rng.uniform(lo, hi)
        elif s.is_positive:
            point[s] = rng.uniform(*cfg.positive_range)
        else:
            x = rng.uniform(*cfg.signed_range)
            point[s] = x if rng.random() < 0.5 else -x
    return point


def _numeric_zero(e: sp.Expr, cfg: SamplingConfig, ranges=None) -> TriState:
    _check_evaluable(e)
    terms, num = _terms(e)
    symbols = sorted(num.free_symbols, key=lambda s: s.name)
    rng = random.Random(cfg.seed)
    pts = []
    worst = 0.0
    with mpmath.workdps(cfg.dps):
        f = sp.lambdify(symbols, [num] + terms, modules="mpmath")
        got = 0
        attempts = 0
        while got < cfg.samples:
            attempts += 1
            if attempts > cfg.samples * cfg.max_attempts:
                return TriState(Verdict.UNKNOWN, {
                    "path": "numeric", "reason": "too many singular sample points",
                    "config": cfg.as_dict()})
            point = _sample_point(symbols, cfg, rng, ranges)
            try:
                vals = f(*[mpmath.mpf(point[s]) for s in symbols])
            except (ZeroDivisionError, ValueError, OverflowError, TypeError):
                continue
            total = vals[0]
            mag = sum(abs(v) for v in vals[1:])
            if not mpmath.isfinite(abs(total)) or not mpmath.isfinite(mag):
                continue
            rel = mpmath.mpf(0) if mag == 0 else abs(total) / mag
            got += 1
            worst = max(worst, float(rel)) if rel > 0 else worst
            pts.append({"point": {s.name: repr(point[s]) for s in symbols},
                        "relative": mpmath.nstr(rel, 5)})
            if rel > cfg.nonzero_tol:
                return TriState(Verdict.NONZERO, {
                    "path": "numeric", "config": cfg.as_dict(), "points": pts,
                    "decided_by": "sample above nonzero threshold"})
    verdict = Verdict.ZERO if worst < cfg.zero_tol else Verdict.UNKNOWN
    return TriState(verdict, {"path": "numeric", "config": cfg.as_dict(),
                              "points": pts, "max_relative": worst})


def is_zero(e: Any, policy: str = "exact-then-numeric",
            config: Optional[SamplingConfig] = None, ranges: Optional[Mapping] = None,
            on_missing: str = "raise") -> TriState:
    """Tri-state zero test.

    ``policy`` is ``'exact'`` (rewrite path only), ``'exact-then-numeric'``
    (rewrite path, then numeric sampling if undecided) or ``'numeric'``
    (sampling only; the canonical form is still recorded).  With
    ``on_missing='unknown'`` a missing numeric evaluator yields Unknown
    instead of raising.
    """
    cfg = config or DEFAULT_SAMPLING
    e = sp.sympify(e)
    if policy not in ("exact", "exact-then-numeric", "numeric"):
        raise ScalarError(f"unknown policy {policy!r}")
    c = canonicalize(e) if policy != "numeric" else None
    if c is not None and c == 0:
        return TriState(Verdict.ZERO, {"path": "exact", "canonical": "0"})
    if c is not None and c.is_Number:
        return TriState(Verdict.NONZERO, {"path": "exact", "canonical": to_text(c)})
    if policy == "exact":
        if c is not None and not c.free_symbols and not _opaque_functions(c):
            # closed constant: decide by high precision evaluation
            val = sp.N(c, 60)
            if val != 0 and abs(val) > 1e-40:
                return TriState(Verdict.NONZERO, {"path": "exact", "canonical": to_text(c)})
        return TriState(Verdict.UNKNOWN, {"path": "exact", "canonical": to_text(c),
                                          "reason": "not reduced to 0 by the rewrite set"})
    target = c if c is not None else e
    try:
        t = _numeric_zero(target, cfg, ranges)
    except MissingEvaluatorError as err:
        if on_missing == "unknown":
            return TriState(Verdict.UNKNOWN, {"path": "exact", "canonical": to_text(target),
                                              "reason": str(err)})
        raise
    t.transcript["canonical"] = to_text(target)
    return t


def numeric_value(e: Any, point: Mapping, dps: int = 50):
    """Evaluate ``e`` at ``point`` (symbol -> number) with mpmath at ``dps`` digits."""
    e = sp.sympify(e)
    _check_evaluable(e)
    with mpmath.workdps(dps):
        syms = sorted(e.free_symbols, key=lambda s: s.name)
        f = sp.lambdify(syms, e, modules="mpmath")
        return f(*[mpmath.mpmathify(point[s]) if not isinstance(point[s], sp.Basic)
                   else mpmath.mpmathify(str(sp.N(point[s], dps + 5))) for s in syms])


# ---------------------------------------------------------------------------
# parser

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(("num", m.group(1), start))
        elif m.group(2):
            out.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            out.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text, names, registry):
        self.toks = _tokenize(text)
        self.i = 0
        self.names = names
        self.registry = registry

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])
        return t

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.factor()
            node = node * rhs if op == "*" else node / rhs
        return node

    def factor(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            f = self.factor()
            return -f if t[1] == "-" else f
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return base ** self.factor()
        return base

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            return sp.Rational(val) if "." in val else sp.Integer(val)
        if kind == "name":
            if self.peek()[0] == "op" and self.peek()[1] == "(":
                func = self.registry.lookup(val)
                if func is None:
                    raise UnknownIdentifierError(f"unknown function {val!r}", pos)
                self.take()
                args = [self.expr()]
                while self.peek()[0] == "op" and self.peek()[1] == ",":
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                ar = self.registry.arity(val)
                if len(args) != ar:
                    raise ArityError(f"{val} expects {ar} argument(s), got {len(args)}", pos)
                return func(*args)
            if val == "pi":
                return sp.pi
            if val in self.names:
                return self.names[val]
            raise UnknownIdentifierError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)


def parse(text: str, context: Any = None, registry: FunctionRegistry = REGISTRY) -> sp.Expr:
    """Parse ``text`` against a coordinate context.

    ``context`` is a mapping name -> Symbol, an iterable of symbols, or any
    object with a ``symbols()`` method returning such a mapping (charts).
    """
    if context is None:
        names = {}
    elif hasattr(context, "symbol_table"):
        names = dict(context.symbol_table())
    elif isinstance(context, Mapping):
        names = dict(context)
    else:
        names = {s.name: s for s in context}
    p = _Parser(text, names, registry)
    e = p.expr()
    t = p.peek()
    if t[0] != "end":
        raise ParseError(f"unexpected token {t[1]!r}", t[2])
    return e


# ---------------------------------------------------------------------------
# printer (grammar-compatible) and JSON tree

def _prec(e):
    if e.is_Add:
        return 1
    if e.is_Mul or (e.is_Rational and not e.is_Integer):
        return 2
    if e.is_Pow:
        return 4
    if e.is_Number and e < 0:
        return 1
    return 5


def to_text(e: Any) -> str:
    """Print in the parser's grammar (``^`` for powers); round-trips via parse."""
    e = sp.sympify(e)
    return _txt(e)


def _txt(e) -> str:
    if e is sp.pi:
        return "pi"
    if e is sp.E:
        return "exp(1)"
    if e.is_Integer:
        return str(int(e))
    if e.is_Rational:
        return f"{e.p}/{e.q}"
    if e.is_Float:
        r = sp.Rational(str(e))
        return _txt(r)
    if e.is_Symbol:
        return e.name
    if e.is_Add:
        terms = list(e.as_ordered_terms())
        s = _txt(terms[0])
        for t in terms[1:]:
            c, _ = t.as_coeff_Mul()
            if c.is_Number and c < 0:
                s += " - " + _wrap(-t, 2)
            else:
                s += " + " + _wrap(t, 1)
        return s
    if e.is_Mul:
        c, rest = e.as_coeff_Mul()
        if c == -1:
            return "-" + _wrap(rest, 2)
        num, den = [], []
        for f in sp.Mul.make_args(e):
            if f.is_Pow and f.exp.is_Number and f.exp < 0:
                den.append(f.base ** (-f.exp))
            elif f.is_Rational and not f.is_Integer:
                if f.p != 1:
                    num.append(sp.Integer(f.p))
                den.append(sp.Integer(f.q))
            else:
                num.append(f)
        ns = "*".join(_wrap(f, 2) for f in num) if num else "1"
        if den:
            ds = "*".join(_wrap(f, 3) for f in den)
            if len(den) > 1:
                ds = "(" + ds + ")"
            return ns + "/" + ds
        return ns
    if e.is_Pow:
        b, x = e.args
        if x == sp.Rational(1, 2):
            return f"sqrt({_txt(b)})"
        if x.is_Number and x < 0:
            return "1/" + _wrap(b ** (-x), 3)
        return _wrap(b, 5) + "^" + _wrap(x, 5)
    if isinstance(e, sp.exp):
        return f"exp({_txt(e.args[0])})"
    if isinstance(e, sp.Function):
        name = type(e).__name__
        return f"{name}(" + ", ".join(_txt(a) for a in e.args) + ")"
    return sp.sstr(e)


def _wrap(e, level):
    s = _txt(e)
    if _prec(e) < level or (level >= 3 and _prec(e) < 5 and not e.is_Pow) or (
            level == 5 and (e.is_Pow or (e.is_Number and (e < 0 or not e.is_Integer)))):
        return "(" + s + ")"
    return s


def to_json(e: Any):
    """JSON tree: {"num": "p/q"}, {"sym": name}, {"const": "pi"},
    {"fn": name, "args": [...]}, {"add": [...]}, {"mul": [...]}, {"pow": [b, e]}."""
    e = sp.sympify(e)
    if e is sp.pi:
        return {"const": "pi"}
    if e.is_Rational:
        return {"num": str(e)}
    if e.is_Symbol:
        return {"sym": e.name}
    if e.is_Add:
        return {"add": [to_json(a) for a in sorted(e.args, key=sp.default_sort_key)]}
    if e.is_Mul:
        return {"mul": [to_json(a) for a in sorted(e.args, key=sp.default_sort_key)]}
    if e.is_Pow:
        return {"pow": [to_json(e.args[0]), to_json(e.args[1])]}
    if isinstance(e, sp.Function):
        return {"fn": type(e).__name__, "args": [to_json(a) for a in e.args]}
    if e is sp.E:
        return {"fn": "exp", "args": [{"num": "1"}]}
    raise ScalarError(f"cannot serialize {e!r}")


def from_json(tree, context: Any = None, registry: FunctionRegistry = REGISTRY):
    if context is None:
        names = {}
    elif hasattr(context, "symbol_table"):
        names = dict(context.symbol_table())
    elif isinstance(context, Mapping):
        names = dict(context)
    else:
        names = {s.name: s for s in context}

    def rec(t):
        if "num" in t:
            return sp.Rational(t["num"])
        if "const" in t:
            if t["const"] != "pi":
                raise ScalarError(f"unknown constant {t['const']}")
            return sp.pi
        if "sym" in t:
            if t["sym"] not in names:
                names[t["sym"]] = sp.Symbol(t["sym"])
            return names[t["sym"]]
        if "add" in t:
            return sp.Add(*[rec(a) for a in t["add"]])
        if "mul" in t:
            return sp.Mul(*[rec(a) for a in t["mul"]])
        if "pow" in t:
            return sp.Pow(rec(t["pow"][0]), rec(t["pow"][1]))
        if "fn" in t:
            f = registry.lookup(t["fn"])
            if f is None:
                f = registry.register(t["fn"], len(t["args"]))
            return f(*[rec(a) for a in t["args"]])
        raise ScalarError(f"bad JSON node {t!r}")

    return rec(tree)
