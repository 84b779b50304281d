"""``edskit`` command-line front end.

Exit codes: 0 Zero / affirmative, 1 NonZero / negative, 2 Unknown, 3 usage or
input errors, 4 internal errors.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from typing import Any, Dict, List, Optional, Tuple

import sympy as sp

from . import __version__
from .certificate import dumps, expr_record, loads, make_certificate
from .dsl import DSLError, ProblemFile, parse_problem
from .variational import VariationalError
from .scalar import ScalarError, SamplingConfig, TriState, Verdict, parse, sampling_defaults, to_text

EXIT_ZERO, EXIT_NONZERO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3, 4

TAGS = {
    "el": "euler-lagrange", "pcform": "poincare-cartan", "betounes": "admissible-lifting",
    "inverse": "inverse-problem", "classify": "monge-ampere-type", "noether": "noether",
    "gensym": "generalized-symmetries", "backlund": "backlund-sine-gordon",
    "mesh": "surface-mesh", "verify": "certificate-check",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"edskit: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _code(verdict: Any) -> int:
    if isinstance(verdict, TriState):
        verdict = verdict.verdict
    if isinstance(verdict, Verdict):
        return {Verdict.ZERO: EXIT_ZERO, Verdict.NONZERO: EXIT_NONZERO, Verdict.UNKNOWN: EXIT_UNKNOWN}[verdict]
    return {"Zero": 0, "NonZero": 1, "Unknown": 2}.get(verdict, EXIT_UNKNOWN)


def _combine(values) -> Verdict:
    vs = [v if isinstance(v, Verdict) else Verdict(v) for v in values]
    if any(v is Verdict.NONZERO for v in vs):
        return Verdict.NONZERO
    if all(v is Verdict.ZERO for v in vs):
        return Verdict.ZERO
    return Verdict.UNKNOWN


# ---------------------------------------------------------------------------
# subcommands: each returns (exit code, verdict text, result, transcripts, lines)

Outcome = Tuple[int, str, Dict[str, Any], Dict[str, Any], List[str]]


def _problem(args) -> ProblemFile:
    if args._text is None:
        raise UsageError("this subcommand needs --file")
    return parse_problem(args._text)


def cmd_el(args) -> Outcome:
    from .variational import el_display, el_equation, el_equations, el_solved_display
    pf = _problem(args)
    L = pf.require("lagrangian")
    if pf.chart.s > 1:
        Es = el_equations(L, pf.chart)
        lines = [f"E_{z} = {to_text(E)}" for z, E in zip(pf.chart.z, Es)]
        res = {"lagrangian": expr_record(L), "E": [expr_record(E) for E in Es]}
        return EXIT_ZERO, "derived", res, {}, lines
    E = el_equation(L, pf.chart)
    disp = el_display(E, pf.chart)
    solved = el_solved_display(E, pf.chart)
    lines = [disp] + ([f"equivalently: {solved}"] if solved else [])
    res = {"lagrangian": expr_record(L), "E": expr_record(E), "display": disp, "solved": solved}
    return EXIT_ZERO, "derived", res, {}, lines


def cmd_pcform(args) -> Outcome:
    from .variational import pc_form_classical
    pf = _problem(args)
    pc = pc_form_classical(pf.require("lagrangian"), pf.chart)
    v = _combine(pc.transcripts.values())
    res = {"Lambda": pc.Lambda, "Pi": pc.Pi, "beta": pc.beta, "Psi": pc.psi}
    lines = [f"Pi = {pc.Pi.to_text()}", f"Psi = {pc.psi.to_text()}",
             "checks: " + ", ".join(f"{k}: {x}" for k, x in sorted(pc.transcripts.items()))]
    return _code(v), v.value, res, dict(pc.transcripts), lines


def cmd_betounes(args) -> Outcome:
    from .variational import betounes_form
    pf = _problem(args)
    pc = betounes_form(pf.require("lagrangian"), pf.chart)
    vals = [x for x in pc.transcripts.values() if x in ("Zero", "NonZero", "Unknown")]
    v = _combine(vals) if vals else Verdict.ZERO
    res = {"Pi": pc.Pi}
    return _code(v), v.value, res, dict(pc.transcripts), [f"Pi = {pc.Pi.to_text()}"]


def _ma_from_problem(pf: ProblemFile):
    from .inverse import MongeAmpereSystem, poisson_system
    if "poisson" in pf.values:
        return poisson_system(pf.values["poisson"], pf.chart._clone(1)), pf.values["poisson"]
    if "psi" in pf.values:
        psi = pf.values["psi"]
        S = psi.space
        ch = pf.chart
        th = pf.values.get("theta")
        if th is None:
            th = S.d_atom(ch.z[0])
            for i in range(ch.n):
                th = th - ch.pi(i) * S.d_atom(ch.x[i])
        return MongeAmpereSystem(S, th, psi), None
    raise UsageError("problem file needs 'poisson' or 'psi'")


def cmd_inverse(args) -> Outcome:
    from .inverse import is_euler_lagrange, poisson_el_test
    pf = _problem(args)
    ma, f = _ma_from_problem(pf)
    cert = is_euler_lagrange(ma)
    res: Dict[str, Any] = {"verdict": cert.verdict, "phi": cert.phi, "u": cert.u}
    tr: Dict[str, Any] = {"criterion": cert.transcripts}
    lines = [f"verdict: {cert.verdict}"]
    if cert.u is not None:
        lines.append(f"u = {to_text(cert.u)}")
    if f is not None:
        pr = poisson_el_test(f, chart=pf.chart._clone(1))
        res["poisson_test"] = {"passed": pr.passed, "b": pr.b, "a": pr.a, "failed": pr.failed}
        tr["poisson_test"] = pr.transcript
        lines.append(f"poisson family test: {'member' if pr.passed else 'not a member'}")
        if pr.passed != cert.affirmative and not cert.verdict.startswith("unknown"):
            raise RuntimeError("the two inverse-problem tests disagree")
    if cert.verdict.startswith("locally Euler-Lagrange"):
        code = EXIT_ZERO
    elif cert.verdict == "not":
        code = EXIT_NONZERO
    else:
        code = EXIT_UNKNOWN
    return code, cert.verdict, res, tr, lines


def cmd_classify(args) -> Outcome:
    from .inverse import InverseError, ma_classify
    pf = _problem(args)
    ma, _ = _ma_from_problem(pf)
    try:
        c = ma_classify(ma)
    except InverseError as exc:
        return EXIT_UNKNOWN, "undecidable", {"reason": str(exc)}, {}, [f"type: unknown ({exc})"]
    return EXIT_ZERO, c["type"], {"type": c["type"], "mu": c["mu_text"]}, {}, \
        [f"type: {c['type']} (mu = {c['mu_text']})"]


def cmd_noether(args) -> Outcome:
    from .forms import VectorField
    from .noether import PRESCRIPTION, contact_field_from_generating_function, noether
    from .variational import el_system, pc_form_classical
    pf = _problem(args)
    ch = pf.chart._clone(1)
    pc = pc_form_classical(pf.require("lagrangian"), ch)
    if pf.vector:
        v = VectorField.from_coordinates(pc.space, pf.vector)
    elif "generating" in pf.values:
        v = contact_field_from_generating_function(pf.values["generating"], ch)
    else:
        raise UsageError("problem file needs 'vector.<coord>' entries or 'generating'")
    law = noether(v, pc, el_system(pc, check=False))
    res = {"phi": law.phi, "prescription": PRESCRIPTION, "sign_convention": "phi = -v_|Lambda0 + (v_|theta) beta + gamma"}
    lines = [f"phi = {law.phi.to_text()}", f"d(phi) in EL ideal: {law.transcript.verdict.value}"]
    return _code(law.transcript), law.transcript.verdict.value, res, \
        {"membership": law.transcript, "extra": law.extra}, lines


def _infer_chart(eq_text: str, order: int):
    from .jets import JetChart
    n = 1
    for m in re.finditer(r"\b[px](\d+)\b", eq_text):
        n = max(n, max(int(c) for c in m.group(1)))
    return JetChart(n, 1, order + 2)


def cmd_gensym(args) -> Outcome:
    from .gensym import solve_generalized_symmetries
    if not args.equation:
        raise UsageError("gensym needs --equation")
    if args._text is not None:
        pf = parse_problem(args._text)
        ch = pf.chart._clone(args.order + 2)
        ctx = dict(ch.symbol_table())
        ctx.update(pf.params)
    else:
        ch = _infer_chart(args.equation, args.order)
        ctx = ch.symbol_table()
    E = parse(args.equation, ctx)
    sol = solve_generalized_symmetries(E, ch, order=args.order, degree=args.degree)
    res = {"equation": expr_record(E), "dimension": sol.dimension,
           "classical_dimension": sol.classical_dimension,
           "basis": [{"g": to_text(g), "tag": t} for g, t in zip(sol.basis, sol.tags)],
           "scope": f"polynomial ansatz: order <= {args.order}, degree <= {args.degree}"}
    lines = [f"{t}: {to_text(g)}" for g, t in zip(sol.basis, sol.tags)]
    lines.append(f"dimension {sol.dimension} ({sol.classical_dimension} classical) within the ansatz")
    return EXIT_ZERO, "solved", res, sol.transcript, lines


def cmd_backlund(args) -> Outcome:
    from .geometry import backlund_sg
    r1 = backlund_sg(0, args.lam, args.c)
    res: Dict[str, Any] = {"step1": {"u": r1.u, "lambda": r1.lam}}
    tr: Dict[str, Any] = {"step1": r1.verification}
    lines = [f"step 1: u = {to_text(r1.u)} ({r1.verification.verdict.value})"]
    verdicts = [r1.verification.verdict]
    if args.steps >= 2:
        r2 = backlund_sg(r1.u, args.lam2, 0, grid=args.grid)
        res["step2"] = {"lambda": r2.lam, "grid": args.grid, "residual_sup": r2.residual_sup,
                        "compatibility": r2.compatibility}
        tr["step2"] = r2.verification
        lines.append(f"step 2: grid {args.grid}x{args.grid}, residual sup {r2.residual_sup:.3e}, "
                     f"compatibility {r2.compatibility:.3e} ({r2.verification.verdict.value})")
        verdicts.append(r2.verification.verdict)
    v = _combine(verdicts)
    return _code(v), v.value, res, tr, lines


def cmd_mesh(args) -> Outcome:
    from .geometry import export_mesh, parse_obj, plane, pseudosphere_from_line, round_sphere
    surfaces = {"pseudosphere": pseudosphere_from_line, "sphere": round_sphere, "plane": plane}
    if args.surface not in surfaces:
        raise UsageError(f"unknown surface {args.surface!r}")
    p = surfaces[args.surface]()
    try:
        nu, nv = (int(t) for t in args.resolution.lower().split("x"))
    except ValueError as exc:
        raise UsageError("resolution must look like 40x40") from exc
    text = export_mesh(p, (nu, nv), path=args.out)
    verts, faces = parse_obj(text)
    res = {"surface": p.name, "vertices": len(verts), "faces": len(faces), "out": args.out}
    return EXIT_ZERO, "written", res, {}, [f"{len(verts)} vertices, {len(faces)} faces"
                                            + (f" -> {args.out}" if args.out else "")]


COMMANDS = {"el": cmd_el, "pcform": cmd_pcform, "betounes": cmd_betounes, "inverse": cmd_inverse,
            "classify": cmd_classify, "noether": cmd_noether, "gensym": cmd_gensym,
            "backlund": cmd_backlund, "mesh": cmd_mesh}


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="edskit", description="Exterior differential systems toolkit")
    ap.add_argument("--version", action="version", version=f"edskit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", help="problem file (.eds)")
    common.add_argument("--certificate", help="certificate path (written; read by 'verify')")
    common.add_argument("--format", choices=["text", "json", "latex"], default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--precision", type=int, default=50, help="working digits for sampling")
    common.add_argument("--samples", type=int, default=32)
    common.add_argument("--order", type=int, default=2)
    common.add_argument("--degree", type=int, default=3)
    common.add_argument("--equation")
    common.add_argument("--lambda", dest="lam", type=float, default=1.0)
    common.add_argument("--lambda2", dest="lam2", type=float, default=2.0)
    common.add_argument("--c", type=float, default=0.0)
    common.add_argument("--steps", type=int, default=2)
    common.add_argument("--grid", type=int, default=101)
    common.add_argument("--surface", default="pseudosphere")
    common.add_argument("--resolution", default="40x40")
    common.add_argument("--out")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    for name in list(COMMANDS) + ["verify"]:
        sub.add_parser(name, parents=[common], help=TAGS[name])
    return ap


def _normalize_argv(argv: List[str]) -> List[str]:
    """argv without the certificate path and with the file path relative-insensitive."""
    out, skip = [], False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a == "--certificate":
            skip = True
            continue
        if a.startswith("--certificate="):
            continue
        if a == "--file" and i + 1 < len(argv):
            out += ["--file", os.path.basename(argv[i + 1])]
            skip = True
            continue
        out.append(a)
    return out


def execute(argv: List[str], text: Optional[str] = None) -> Tuple[int, Dict[str, Any], List[str]]:
    """Run a subcommand and return (exit code, certificate, output lines)."""
    args = build_parser().parse_args(argv)
    if args.command is None or args.command == "verify":
        raise UsageError("execute() needs an analysis subcommand")
    if text is None and args.file:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    args._text = text
    cfg = SamplingConfig(samples=args.samples, dps=args.precision, seed=args.seed)
    with sampling_defaults(cfg):
        code, verdict, res, tr, lines = COMMANDS[args.command](args)
    tag = TAGS[args.command]
    norm = _normalize_argv(argv)
    cert = make_certificate(args.command, norm, {"text": text or "", "file": os.path.basename(args.file or "")},
                            res, verdict, code, tr, cfg.as_dict(), tag)
    return code, cert, [f"[{tag}] {ln}" for ln in lines]


def verify_certificate(path: str) -> Tuple[int, List[str]]:
    with open(path, encoding="utf-8") as fh:
        cert = loads(fh.read())
    code, again, _ = execute(cert["argv"], text=cert["inputs"].get("text") or None)
    same = dumps(again) == dumps(cert)
    lines = [f"[{TAGS['verify']}] re-ran '{cert['command']}': verdict {again['verdict']} "
             f"(recorded {cert['verdict']}); certificate {'reproduced' if same else 'DIFFERS'}"]
    return (EXIT_ZERO if same else EXIT_NONZERO), lines


def run(argv: List[str] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            build_parser().print_help()
            return EXIT_USAGE
        if args.command == "verify":
            if not args.certificate:
                raise UsageError("verify needs --certificate")
            code, lines = verify_certificate(args.certificate)
            print("\n".join(lines))
            return code
        code, cert, lines = execute(argv)
        if args.certificate:
            with open(args.certificate, "w", encoding="utf-8") as fh:
                fh.write(dumps(cert))
        if args.format == "json":
            sys.stdout.write(dumps(cert))
        elif args.format == "latex":
            for k, v in sorted(cert["result"].items()):
                if isinstance(v, dict) and "latex" in v:
                    print(f"{k}: {v['latex']}")
        else:
            print("\n".join(lines))
        return code
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, DSLError, ScalarError, VariationalError, FileNotFoundError, ValueError) as exc:
        sys.stderr.write(f"edskit: error: {exc}\n")
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001 - reported with its own exit code
        sys.stderr.write(f"edskit: internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
