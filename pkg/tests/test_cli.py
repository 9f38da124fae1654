from __future__ import annotations

import pytest

from qflag import cli


def run(capsys, *args):
    code = cli.main(list(args))
    return code, capsys.readouterr().out


def test_weyl_table(capsys):
    code, out = run(capsys, "weyl", "--type", "A", "--rank", "2", "--S", "1")
    assert code == 0
    words = [l.split()[0] for l in out.splitlines()[1:]]
    assert words == ["word=e", "word=s2", "word=s1s2"]


def test_spectrum_a1(capsys):
    code, out = run(capsys, "spectrum", "--type", "A", "--rank", "1", "--sigma", "1", "--lambda", "1", "--N", "4")
    assert code == 0
    assert "eigenvalues=(1,0.25,0.0625,0.015625)" in out


def test_spectrum_other_q(capsys):
    code, out = run(capsys, "spectrum", "--type", "A", "--rank", "1", "--sigma", "1", "--lambda", "1",
                    "--N", "3", "--q", "1/3")
    assert code == 0
    vals = out.split("eigenvalues=(")[1].split(")")[0].split(",")
    assert [float(v) for v in vals] == pytest.approx([1, 1 / 9, 1 / 81])


def test_gelfand_g2_empty(capsys):
    code, out = run(capsys, "gelfand", "--type", "G", "--rank", "2")
    assert code == 0 and "count=0" in out


def test_tensor_and_module(capsys):
    code, out = run(capsys, "tensor", "--type", "A", "--rank", "2", "--lambda", "1,0", "--lambda2", "0,1")
    assert code == 0 and "component=(1,1) multiplicity=1" in out
    code, out = run(capsys, "module", "--type", "B", "--rank", "2", "--lambda", "1,1")
    assert code == 0 and "dim=16" in out


@pytest.mark.parametrize("args", [
    ["module", "--type", "A", "--rank", "2", "--lambda=-1,0"],
    ["weyl", "--type", "A", "--rank", "2", "--S", "3"],
    ["spectrum", "--type", "A", "--rank", "2", "--sigma", "1,1", "--lambda", "1,0"],
    ["spectrum", "--type", "A", "--rank", "2", "--lambda", "1,0"],
    ["roots", "--type", "Q", "--rank", "2"],
    ["roots", "--type", "A", "--rank", "2", "--q", "2"],
    ["verify-h1", "--type", "A", "--rank", "2", "--S", "1", "--sigma", "1", "--lambda", "0,1"],
])
def test_config_errors(capsys, args):
    code, out = run(capsys, *args)
    assert code == cli.EXIT_CONFIG and out.startswith("error=config")


def test_indeterminate(capsys, monkeypatch):
    def boom(*a, **k):
        raise cli.um.ModuleTooLarge("cap")

    monkeypatch.setattr(cli.um, "build_irreducible", boom)
    code, out = run(capsys, "module", "--type", "A", "--rank", "2", "--lambda", "3,3")
    assert code == cli.EXIT_INDETERMINATE and "status=indeterminate" in out


def test_verify_commands_pass(capsys):
    for args in (["verify-part1", "--type", "A", "--rank", "2", "--sigma", "1,2", "--N", "5"],
                 ["verify-inequivalence", "--type", "A", "--rank", "2", "--S", "2"],
                 ["verify-unitarity", "--type", "A", "--rank", "1", "--lambda", "1"],
                 ["prv", "--type", "A", "--rank", "2", "--S", "2"],
                 ["factorize", "--type", "A", "--rank", "2", "--S", "2"]):
        code, out = run(capsys, *args)
        assert code == 0, out
        assert "verdict=fail" not in out


def test_failure_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli.ca, "unitarity_check", lambda *a, **k: False)
    code, out = run(capsys, "verify-unitarity", "--type", "A", "--rank", "1", "--lambda", "1")
    assert code == cli.EXIT_FAIL and "verdict=fail" in out


def test_deterministic_output(capsys, tmp_path):
    path = tmp_path / "r.txt"
    args = ["verify-h1", "--type", "A", "--rank", "2", "--S", "2", "--output", str(path)]
    _, first = run(capsys, *args)
    _, second = run(capsys, *args)
    assert first == second == path.read_text()


def test_suite_matrix_covers_anchors():
    names = {name for name, _ in cli._suite_matrix()}
    assert {"verify-unitarity", "verify-commutation", "verify-part1", "verify-h1",
            "verify-inequivalence", "verify-restriction", "prv", "factorize", "facto",
            "gns", "reduced-word"} <= names
