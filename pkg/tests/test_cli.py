import json
import subprocess
import sys

import pytest

from artinlen.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(path)


class TestRingInfo:
    def test_bundled(self, capsys):
        code, out, _ = run(capsys, "ring-info", "x2y2")
        info = json.loads(out)
        assert code == 0
        assert (info["dim"], info["hilbert"], info["socle_dim"]) == (4, [1, 2, 1], 1)

    def test_malformed(self, capsys, tmp_path):
        code, _, err = run(capsys, "ring-info", write(tmp_path, "r.json", "{oops"))
        assert code == 2 and "artinlen" in err

    def test_missing(self, capsys):
        assert run(capsys, "ring-info", "no_such_ring")[0] == 2

    def test_not_artinian(self, capsys, tmp_path):
        path = write(tmp_path, "r.json", {"name": "r", "char": 7, "vars": ["x", "y"],
                                          "relations": ["x^2"], "degree_cap": 8})
        assert run(capsys, "ring-info", path)[0] == 2


class TestResolve:
    def test_cyclic(self, capsys, tmp_path):
        mod = write(tmp_path, "m.json", {"ring": "x2y2", "generators": 1, "relations": [["x"]]})
        code, out, _ = run(capsys, "resolve", "x2y2", mod, "--stages", "10")
        res = json.loads(out)
        assert code == 0
        assert res["betti"] == [1] * 11 and res["lengths"] == [2] * 11
        assert (res["periodic"]["i"], res["periodic"]["j"]) == (0, 1)

    def test_free(self, capsys, tmp_path):
        mod = write(tmp_path, "m.json", {"ring": "x2y2", "generators": 1, "relations": []})
        code, out, _ = run(capsys, "resolve", "x2y2", mod, "--stages", "3")
        assert json.loads(out)["betti"] == [1, 0, 0, 0]

    def test_stages_zero(self, capsys):
        code, out, _ = run(capsys, "resolve", "x2y2", "k", "--stages", "0")
        assert json.loads(out)["betti"] == [1]

    def test_budget(self, capsys):
        code, out, err = run(capsys, "resolve", "m2zero", "k", "--stages", "14")
        res = json.loads(out)
        assert code == 3 and res["truncated"]
        assert res["betti"][:13] == [2**n for n in range(13)]

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "t.json"
        code, out, _ = run(capsys, "resolve", "x2y2", "k", "--stages", "4", "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["betti"] == [1, 2, 3, 4, 5]


class TestVerify:
    def test_ci4_wrong_class(self, capsys):
        assert run(capsys, "verify", "ci4", "m2zero", "--stages", "4")[0] == 4

    def test_bad_exponents(self, capsys):
        assert run(capsys, "verify", "monomial-ci", "3,3")[0] == 4

    def test_ci4_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "ci4", "x2y2", "--stages", "6", "--count", "2",
                           "--controls", "1")
        assert code == 0 and json.loads(out)["passed"]

    def test_limits(self, capsys):
        code, out, _ = run(capsys, "verify", "limits", "--h", "2,3")
        assert code == 0 and len(json.loads(out)["records"]) == 4

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "verify", "monomial-ci", "--exponents", "2,2", "--stages", "5",
                           "--count", "0", "--controls", "0", "--format", "csv")
        assert code == 0 and out.startswith("module,length,beta_0")

    def test_deterministic_files(self, capsys, tmp_path):
        outs = []
        for name in ("a.json", "b.json"):
            target = tmp_path / name
            run(capsys, "verify", "ci4", "x2y2", "--stages", "5", "--count", "3", "--seed", "9",
                "--out", str(target))
            outs.append(target.read_bytes())
        assert outs[0] == outs[1]

    def test_wrong_ring_count(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "flat", "x2y2"])
        assert info.value.code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "artinlen", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("artinlen ")
