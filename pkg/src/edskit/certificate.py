"""Versioned JSON certificates pairing results with their verification transcripts."""
from __future__ import annotations

import enum
import hashlib
import json
from typing import Any, Dict

import mpmath
import numpy as np
import sympy as sp

from . import __version__
from .forms import DifferentialForm
from .scalar import TriState, to_json, to_text

__all__ = ["SCHEMA", "sanitize", "make_certificate", "dumps", "loads", "digest"]

SCHEMA = "edskit-certificate/1"


def sanitize(obj: Any) -> Any:
    """Convert results and transcripts into plain JSON values deterministically."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return float(repr(obj)) if obj == obj else "nan"
    if isinstance(obj, TriState):
        return {"verdict": obj.verdict.value, "transcript": sanitize(obj.transcript)}
    if isinstance(obj, DifferentialForm):
        return {"degree": obj.degree, "text": obj.to_text(), "latex": obj.to_latex(),
                "tree": sanitize(obj.to_json())}
    if isinstance(obj, (mpmath.mpf, mpmath.mpc)):
        return mpmath.nstr(obj, 25)
    if isinstance(obj, np.ndarray):
        return {"shape": list(obj.shape), "sup": float(np.max(np.abs(obj))) if obj.size else 0.0}
    if isinstance(obj, np.generic):
        return sanitize(obj.item())
    if isinstance(obj, sp.Basic):
        return to_text(obj)
    if isinstance(obj, dict):
        return {str(k if not isinstance(k, sp.Basic) else to_text(k)): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [sanitize(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items = sorted(items, key=lambda x: json.dumps(x, sort_keys=True))
        return items
    return str(obj)


def expr_record(e) -> Dict[str, Any]:
    e = sp.sympify(e)
    return {"text": to_text(e), "latex": sp.latex(e), "tree": to_json(e)}


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_certificate(command: str, argv, inputs: Dict[str, Any], result: Dict[str, Any],
                     verdict: str, exit_code: int, transcripts: Dict[str, Any],
                     sampling: Dict[str, Any], tag: str) -> Dict[str, Any]:
    text = inputs.get("text", "")
    return sanitize({
        "schema": SCHEMA,
        "tool": {"name": "edskit", "version": __version__},
        "command": command,
        "argv": list(argv),
        "tag": tag,
        "inputs": {**inputs, "digest": digest(text + "\x00" + json.dumps(list(argv)))},
        "result": result,
        "verdict": verdict,
        "exit_code": exit_code,
        "transcripts": transcripts,
        "sampling": sampling,
    })


def dumps(cert: Dict[str, Any]) -> str:
    return json.dumps(cert, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> Dict[str, Any]:
    cert = json.loads(text)
    if cert.get("schema") != SCHEMA:
        raise ValueError(f"unsupported certificate schema {cert.get('schema')!r}")
    return cert
