"""The ``.eds`` problem-file language.

A problem file is a sequence of lines; ``#`` starts a comment.  Grammar
(EBNF; ``expr`` is the scalar expression grammar of :mod:`edskit.scalar`)::

    file        = { line } ;
    line        = [ statement ] [ "#" { any } ] NEWLINE ;
    statement   = chart | param | function | assignment ;
    chart       = "chart" chart-opt { chart-opt } ;
    chart-opt   = "independent" idlist | "dependent" idlist | "order" INT
                | "signature" intlist | "labels" idlist | "prefix" IDENT ;
    param       = "param" idlist [ assumption ] ;
    assumption  = "positive" | "real" | "nonzero" ;
    function    = "function" IDENT "(" INT ")" [ "derivative" IDENT ]
                  [ "display" IDENT ] ;
    assignment  = key "=" value ;
    key         = "lagrangian" | "poisson" | "equation" | "generating"
                | "seed" | "lambda" | "constant" | "psi" | "theta"
                | "vector" "." IDENT ;
    value       = expr | form ;                     (* form only for psi, theta *)
    form        = form-term { ("+" | "-") form-term } ;
    form-term   = [ factor "*" ] DIFF { "&" DIFF } ;
    DIFF        = "d" IDENT ;                      (* differential of a coordinate *)
    idlist      = IDENT { "," IDENT } ;
    intlist     = INT { "," INT } ;

Coefficients of form terms containing ``+`` or ``-`` must be parenthesized.
"""
from __future__ import annotations

import dataclasses
import re
from typing import Any, Dict, List, Optional

import sympy as sp

from .forms import DifferentialForm
from .jets import JetChart
from .scalar import ParseError, function_symbol, parse

__all__ = ["DSLError", "ProblemFile", "parse_problem", "load_problem", "parse_form"]


class DSLError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {message}" if line else message)
        self.line = line
        self.column = column


EXPR_KEYS = {"lagrangian", "poisson", "equation", "generating", "seed", "lambda", "constant"}
FORM_KEYS = {"psi", "theta"}
ASSUMPTIONS = {"positive": {"positive": True}, "real": {"real": True}, "nonzero": {"nonzero": True}}


@dataclasses.dataclass
class ProblemFile:
    text: str
    chart: JetChart
    params: Dict[str, sp.Symbol]
    functions: Dict[str, Any]
    values: Dict[str, Any]
    vector: Dict[sp.Symbol, sp.Expr]
    chart_options: Dict[str, Any]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def context(self) -> Dict[str, sp.Symbol]:
        ctx = dict(self.chart.symbol_table())
        ctx.update(self.params)
        return ctx

    def require(self, key):
        if key not in self.values:
            raise DSLError(f"problem file has no '{key}' entry")
        return self.values[key]


def _ids(tokens: List[str]) -> List[str]:
    out = []
    for t in " ".join(tokens).split(","):
        t = t.strip()
        if t:
            out.extend(t.split())
    return out


def _parse_chart(words: List[str], lineno: int) -> Dict[str, Any]:
    opts: Dict[str, Any] = {}
    keys = {"independent", "dependent", "order", "signature", "labels", "prefix"}
    i = 0
    while i < len(words):
        k = words[i]
        if k not in keys:
            raise DSLError(f"unknown chart option {k!r}", lineno, 1)
        j = i + 1
        while j < len(words) and words[j] not in keys:
            j += 1
        vals = _ids(words[i + 1:j])
        if not vals:
            raise DSLError(f"chart option {k!r} needs a value", lineno, 1)
        if k in ("order",):
            opts[k] = int(vals[0])
        elif k == "signature":
            opts[k] = [int(v) for v in vals]
        elif k == "prefix":
            opts[k] = vals[0]
        else:
            opts[k] = vals
        i = j
    return opts


def _build_chart(opts: Dict[str, Any], order_hint: int) -> JetChart:
    xs = opts.get("independent", ["x1", "x2"])
    zs = opts.get("dependent", ["z"])
    order = opts.get("order", order_hint)
    return JetChart(len(xs), len(zs), order, x_names=xs, z_names=zs, labels=opts.get("labels"),
                    p_prefix=opts.get("prefix", "p"), signature=opts.get("signature"))


_TERM = re.compile(r"^(?:(?P<coef>.*)\*)?\s*(?P<diffs>d\w+(?:\s*&\s*d\w+)*)\s*$", re.S)


def _split_top(text: str) -> List[tuple]:
    """Split at top-level + / − (not inside parentheses, not after ^ * / or at start)."""
    parts, depth, cur, sign = [], 0, "", 1
    prev = ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in "+-" and depth == 0 and prev.strip() and prev.strip()[-1] not in "^*/(":
            parts.append((sign, cur))
            sign, cur = (1 if ch == "+" else -1), ""
        elif ch in "+-" and depth == 0 and not cur.strip():
            sign = sign * (1 if ch == "+" else -1)
        else:
            cur += ch
        prev = prev + ch if ch != " " else prev
    parts.append((sign, cur))
    return [(s, c) for s, c in parts if c.strip()]


def parse_form(text: str, chart: JetChart, context: Dict[str, sp.Symbol] = None,
               order: int = 1) -> DifferentialForm:
    """Parse ``coef*dA & dB - …`` on the chart's coordinate coframe of the given order."""
    S = chart.coframe(order)
    ctx = context or chart.symbol_table()
    acc: Optional[DifferentialForm] = None
    for sign, term in _split_top(text):
        m = _TERM.match(term.strip())
        if not m:
            raise DSLError(f"cannot read form term {term.strip()!r}")
        coef = sp.Integer(1)
        if m.group("coef") and m.group("coef").strip():
            coef = parse(m.group("coef").strip(), ctx)
        f = S.scalar(sign * coef)
        for dname in re.split(r"\s*&\s*", m.group("diffs").strip()):
            sym = ctx.get(dname[1:])
            if sym is None or dname not in S.index:
                raise DSLError(f"unknown differential {dname!r}")
            f = f ^ S.d_atom(sym)
        acc = f if acc is None else acc + f
    if acc is None:
        raise DSLError("empty form")
    return acc


def parse_problem(text: str) -> ProblemFile:
    chart_opts: Dict[str, Any] = {}
    params: Dict[str, sp.Symbol] = {}
    functions: Dict[str, Any] = {}
    raw: List[tuple] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        stripped = body.strip()
        col0 = len(body) - len(body.lstrip()) + 1
        head = stripped.split()[0]
        if head == "chart":
            chart_opts.update(_parse_chart(stripped.split()[1:], lineno))
        elif head == "param":
            words = stripped.split()[1:]
            assume = {}
            if words and words[-1] in ASSUMPTIONS:
                assume = ASSUMPTIONS[words.pop()]
            for nm in _ids(words):
                params[nm] = sp.Symbol(nm, **assume)
        elif head == "function":
            m = re.match(r"function\s+(\w+)\s*\(\s*(\d+)\s*\)\s*(?:derivative\s+(\w+))?\s*(?:display\s+(\S+))?\s*$",
                         stripped)
            if not m:
                raise DSLError("malformed function declaration", lineno, col0)
            name, ar, der, disp = m.groups()
            functions[name] = function_symbol(name, int(ar), derivative=der, display=disp)
        elif "=" in stripped:
            key, val = stripped.split("=", 1)
            key = key.strip()
            base = key.split(".")[0]
            if base not in EXPR_KEYS | FORM_KEYS and base != "vector":
                raise DSLError(f"unknown key {key!r}", lineno, col0)
            raw.append((lineno, col0 + body.lstrip().index("=") + 1, key, val))
        else:
            raise DSLError(f"cannot read statement starting with {head!r}", lineno, col0)
    # the chart order must cover the second-order entries
    order_hint = 2 if any(k in ("poisson", "equation") for _, _, k, _ in raw) else 1
    try:
        chart = _build_chart(chart_opts, order_hint)
    except Exception as exc:   # noqa: BLE001 - re-raised with location context
        raise DSLError(f"bad chart declaration: {exc}") from exc
    ctx = dict(chart.symbol_table())
    ctx.update(params)
    values: Dict[str, Any] = {}
    vector: Dict[sp.Symbol, sp.Expr] = {}
    for lineno, col, key, val in raw:
        lead = len(val) - len(val.lstrip())
        try:
            if key in FORM_KEYS:
                values[key] = parse_form(val.strip(), chart, ctx)
            elif key.startswith("vector."):
                sym = ctx.get(key.split(".", 1)[1])
                if sym is None:
                    raise DSLError(f"unknown coordinate in {key!r}", lineno, col)
                vector[sym] = parse(val.strip(), ctx)
            else:
                values[key] = parse(val.strip(), ctx)
        except ParseError as exc:
            raise DSLError(str(exc).rsplit(" at position", 1)[0], lineno, col + lead + exc.pos + 1) from exc
    return ProblemFile(text, chart, params, functions, values, vector, chart_opts)


def load_problem(path: str) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
