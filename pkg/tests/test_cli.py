import io as stdio
import json
import subprocess
import sys

import pytest
from gmpy2 import mpq

from chernmoser import io
from chernmoser.cli import main
from chernmoser.group import validate_sigma
from chernmoser.hermitian import Signature
from chernmoser.maps import Hypersurface
from chernmoser.numbers import gr

from oracles import moser_instance, webster_instance

D3 = Signature(1, 1)


def run(argv, stdin=None, monkeypatch=None):
    out, err = stdio.StringIO(), stdio.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", stdio.StringIO(stdin))
    code = main([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}

    def put(name, text):
        p = tmp_path / name
        p.write_text(text)
        paths[name] = p
        return p

    put("m.json", io.dump_surface(moser_instance(gr(0, 4))))
    put("q.json", io.dump_surface(Hypersurface.quadric(D3, 8)))
    put("s.json", io.dump_sigma(validate_sigma([[gr(1, 1)]], [gr(1, -1)], 2, mpq(1, 2), D3)))
    put("t.json", io.dump_sigma(validate_sigma([[gr(0, 1)]], [gr(2)], 1, 0, D3)))
    put("w.json", io.dump_surface(webster_instance(Signature(2, 2), mpq(1, 3))))
    put("w9.json", io.dump_surface(webster_instance(Signature(2, 2), mpq(1, 2))))
    put("b2.json", io.dump_surface(moser_instance(gr(2))))
    put("o7.json", io.dump_surface(Hypersurface.from_terms(
        D3, {((5,), (2,), 0): gr(1), ((4,), (4,), 0): gr(2)}, 8)))
    paths["dir"] = tmp_path
    return paths


def _checks_ok(report):
    return report["status"] == "ok" and all(c["ok"] for c in report["checks"])


def test_check(files):
    code, out, _ = run(["check", files["m.json"]])
    rep = json.loads(out)
    assert code == 0 and rep["result"]["is_normal"] and rep["result"]["lowest_weight"] == 6
    code, out, _ = run(["check", files["s.json"]])
    assert code == 0 and json.loads(out)["result"]["kind"] == "sigma"


def test_normalize_emits_and_checks(files):
    d = files["dir"]
    code, out, _ = run(["normalize", files["m.json"], "--sigma", files["s.json"], "--weight", 7,
                        "--emit-map", d / "phi.json", "--emit-surface", d / "n.json"])
    rep = json.loads(out)
    assert code == 0 and _checks_ok(rep)
    assert {c["name"] for c in rep["checks"]} == {"identity-residual-zero", "output-normal-form",
                                                   "initial-value-recovered"}
    N = io.load_surface((d / "n.json").read_text())
    assert N.K == 7
    code, out, _ = run(["transform", files["m.json"], "--map", d / "phi.json", "--emit-surface", d / "n2.json"])
    assert code == 0 and _checks_ok(json.loads(out))
    assert (d / "n2.json").read_text() == (d / "n.json").read_text()


def test_output_is_deterministic(files):
    d = files["dir"]
    for name in ("a.json", "b.json"):
        run(["normalize", files["m.json"], "--sigma", files["s.json"], "--emit-surface", d / name])
    assert (d / "a.json").read_bytes() == (d / "b.json").read_bytes()


def test_streaming(files, monkeypatch):
    code, out, err = run(["normalize", "-", "--identity", "--emit-surface", "-"],
                         stdin=files["m.json"].read_text(), monkeypatch=monkeypatch)
    assert code == 0
    assert out == files["m.json"].read_text()
    assert json.loads(err)["command"] == "normalize"


def test_weight_cap_is_strict(files):
    code, _, err = run(["normalize", files["m.json"], "--identity", "--weight", 9])
    assert code == 1 and json.loads(err)["error"] == "TruncationError"


def test_group_commands(files):
    d = files["dir"]
    code, out, _ = run(["group", "invert", files["s.json"], "--emit", d / "si.json"])
    assert code == 0 and _checks_ok(json.loads(out))
    code, out, _ = run(["group", "compose", files["s.json"], d / "si.json"])
    prod = json.loads(out)["result"]["product"]
    assert prod["rho"] == "1/1" and prod["r"] == "0/1" and prod["a"] == [{"re": "0/1", "im": "0/1"}]
    code, out, _ = run(["group", "decompose", files["s.json"]])
    assert code == 0 and _checks_ok(json.loads(out))
    code, _, err = run(["group", "compose", files["s.json"]])
    assert code == 1


def test_phi_sigma(files):
    d = files["dir"]
    code, out, _ = run(["phi-sigma", "--sigma", files["t.json"], "--weight", 6, "--emit-map", d / "p.json"])
    assert code == 0 and _checks_ok(json.loads(out))
    code, out, _ = run(["transform", files["q.json"], "--map", d / "p.json", "--emit-surface", d / "qq.json"])
    assert code == 0
    assert io.load_surface((d / "qq.json").read_text()) == Hypersurface.quadric(D3, 6)


def test_umbilic_and_sphericity(files):
    assert json.loads(run(["umbilic", files["q.json"]])[1])["result"]["umbilic"] is True
    assert json.loads(run(["umbilic", files["m.json"], "--at-u", "1/3"])[1])["result"]["umbilic"] is False
    code, _, err = run(["umbilic", files["m.json"], "--at-u", "0.5"])
    assert code == 1
    assert json.loads(run(["spherical", files["q.json"], "--weight", 8])[1])["result"]["spherical"] is True
    assert json.loads(run(["spherical", files["m.json"]])[1])["result"]["spherical"] is False


def test_reduce(files):
    d = files["dir"]
    code, out, _ = run(["reduce", files["m.json"], "--moser", "--variant", "f52", "--emit-surface", d / "r.json"])
    rep = json.loads(out)
    assert code == 0 and _checks_ok(rep)
    assert [s["step"] for s in rep["result"]["steps"]] == ["a-step", "scale-step", "r-step"]
    code, out, _ = run(["reduce", files["w.json"], "--webster"])
    assert code == 0 and _checks_ok(json.loads(out))


def test_exit_codes(files):
    assert run(["reduce", files["w9.json"], "--webster"])[0] == 3
    code, _, err = run(["reduce", files["b2.json"], "--moser"])
    assert code == 3 and "radicand" in json.loads(err)
    assert run(["reduce", files["q.json"], "--moser"])[0] == 2       # umbilic
    assert run(["lower-weight", files["m.json"]])[0] == 2           # order 6 < 7
    assert run(["check", files["dir"] / "missing.json"])[0] == 1
    bad = files["dir"] / "bad.json"
    bad.write_text('{"n": 1, "e": 1, "truncation_weight": 4, "terms": [{"zi": [2], "zbari": [1], '
                   '"u": 0, "re": "1/1", "im": "0/1"}]}')
    code, _, err = run(["check", bad])
    assert code == 1 and "reality" in json.loads(err)["message"]
    notnormal = files["dir"] / "nn.json"
    notnormal.write_text(io.dump_surface(Hypersurface.from_terms(D3, {((3,), (1,), 0): gr(1)}, 6)))
    assert run(["lowest-weight", notnormal])[0] == 2
    assert run(["umbilic", notnormal])[0] == 2


def test_lower_weight_command(files):
    code, out, _ = run(["lower-weight", files["o7.json"]])
    rep = json.loads(out)
    assert code == 0 and _checks_ok(rep)
    assert (rep["result"]["order_before"], rep["result"]["order_after"]) == (7, 6)


def test_console_script(files):
    proc = subprocess.run([sys.executable, "-m", "chernmoser", "lowest-weight", str(files["m.json"])],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["lowest_weight"] == 6
