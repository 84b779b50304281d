import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from edskit.certificate import SCHEMA, dumps, loads
from edskit.cli import EXIT_USAGE, TAGS, execute, run
from edskit.dsl import DSLError, parse_problem

ROOT = Path(__file__).resolve().parents[1]
PROBLEMS = ROOT / "problems"


def _prob(name):
    return str(PROBLEMS / name)


CASES = [
    (["el", "--file", _prob("energy.eds")], 0),
    (["el", "--file", _prob("harmonic_map.eds")], 0),
    (["pcform", "--file", _prob("energy.eds")], 0),
    (["betounes", "--file", _prob("harmonic_map.eds")], 0),
    (["inverse", "--file", _prob("poisson_member.eds")], 0),
    (["inverse", "--file", _prob("poisson_p1p2.eds")], 1),
    (["classify", "--file", _prob("wave_ma.eds")], 0),
    (["noether", "--file", _prob("wave.eds")], 0),
    (["gensym", "--equation", "p11+p22-z^3-z", "--order", "1", "--degree", "2"], 0),
    (["backlund", "--grid", "41"], 0),
    (["backlund", "--grid", "21"], 2),
    (["mesh", "--resolution", "6x6"], 0),
]


@pytest.mark.parametrize("argv,code", CASES, ids=[" ".join(a[:1] + [Path(a[2]).stem if len(a) > 2 else ""]) for a, _ in CASES])
def test_subcommand_tag_exit_code_and_certificate(argv, code):
    got, cert, lines = execute(argv)
    assert got == code
    tag = TAGS[argv[0]]
    assert lines and all(ln.startswith(f"[{tag}] ") for ln in lines)
    assert cert["schema"] == SCHEMA and cert["tag"] == tag and cert["exit_code"] == code
    assert loads(dumps(cert)) == cert


def test_certificates_identical_for_identical_inputs():
    argv = ["inverse", "--file", _prob("poisson_member.eds")]
    assert dumps(execute(argv)[1]) == dumps(execute(argv)[1])


def _cli(args, seed, tmp):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    return subprocess.run([sys.executable, "-m", "edskit.cli"] + args, cwd=tmp, env=env,
                          capture_output=True, text=True, timeout=300)


def test_certificates_byte_identical_across_hash_seeds(tmp_path):
    outs = []
    for seed in (0, 1, 12345):
        cert = tmp_path / f"c{seed}.json"
        r = _cli(["noether", "--file", _prob("wave.eds"), "--certificate", str(cert)], seed, tmp_path)
        assert r.returncode == 0, r.stderr
        outs.append(cert.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_verify_round_trip(tmp_path, capsys):
    cert = tmp_path / "c.json"
    assert run(["classify", "--file", _prob("laplace.eds"), "--certificate", str(cert)]) == 0
    capsys.readouterr()
    assert run(["verify", "--certificate", str(cert)]) == 0
    assert "reproduced" in capsys.readouterr().out
    data = json.loads(cert.read_text())
    data["verdict"] = "hyperbolic"
    cert.write_text(json.dumps(data, sort_keys=True, indent=2))
    assert run(["verify", "--certificate", str(cert)]) == 1


def test_json_output(capsys):
    assert run(["classify", "--file", _prob("wave_ma.eds"), "--format", "json"]) == 0
    cert = json.loads(capsys.readouterr().out)
    assert cert["result"]["type"] == "hyperbolic"
    assert set(cert) >= {"schema", "tool", "command", "argv", "tag", "inputs", "result",
                         "verdict", "exit_code", "transcripts", "sampling"}


def test_energy_and_wave_outputs():
    _, _, lines = execute(["el", "--file", _prob("energy.eds")])
    assert lines[0] == "[euler-lagrange] Δz − F′(z) = 0"
    _, _, lines = execute(["el", "--file", _prob("wave.eds")])
    assert lines[0] == "[euler-lagrange] □z − g(z) = 0"


@pytest.mark.parametrize("argv", [
    [], ["bogus"], ["el"], ["el", "--file", "/nonexistent/x.eds"], ["verify"],
    ["pcform", "--file", _prob("harmonic_map.eds")], ["mesh", "--surface", "torus"],
    ["mesh", "--resolution", "lots"], ["gensym"],
])
def test_usage_errors_exit_3(argv, capsys):
    assert run(argv) == EXIT_USAGE


def test_dsl_error_carries_position(tmp_path):
    with pytest.raises(DSLError) as ei:
        parse_problem("chart independent x dependent z\nlagrangian = p1^^2\n")
    assert (ei.value.line, ei.value.column) == (2, 18)
    with pytest.raises(DSLError) as ei:
        parse_problem("chart independent x dependent z\n  nonsense = 1\n")
    assert ei.value.line == 2 and ei.value.column == 3
    bad = tmp_path / "bad.eds"
    bad.write_text("chart independent x dependent z\nlagrangian = p1^^2\n")
    assert run(["el", "--file", str(bad)]) == EXIT_USAGE


def test_file_path_does_not_affect_certificate(tmp_path):
    copy = tmp_path / "energy.eds"
    copy.write_text((PROBLEMS / "energy.eds").read_text())
    a = execute(["el", "--file", _prob("energy.eds")])[1]
    b = execute(["el", "--file", str(copy)])[1]
    assert dumps(a) == dumps(b)
