import pytest

import exstats.cli as cli
from exstats.cli import main
from exstats.modelfile import parse_report

TET = """# loops on the boundary of a tetrahedron
[group]
invariants = 2,2
[complex]
vertices = 4
maximal = 0 1 2 | 0 1 3 | 0 2 3 | 1 2 3
[excitation]
p = 1
generators = standard
"""


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("argv,want", [
    (["--builtin", "centered-triangle", "--group", "Z2", "--p", "0"], "T = Z4"),
    (["--builtin", "points:2", "--group", "Z2xZ2", "--p", "-1"], "T = Z2"),
    (["--builtin", "triangle", "--group", "Z3", "--p", "0"], "T = Z3"),
])
def test_compute(capsys, argv, want):
    code, out, _ = run(capsys, "compute", *argv)
    assert code == 0 and out.strip().splitlines()[-1] == want


@pytest.mark.parametrize("process,want", [("[U3,U2^2]", "2"), ("U1 U1^-1", "1"), ("U1", "0")])
def test_order(capsys, process, want):
    code, out, _ = run(capsys, "order", "--builtin", "triangle", "--process", process)
    assert code == 0 and out.strip() == want


def test_report_round_trip(capsys, tmp_path):
    code, _, _ = run(capsys, "compute", "--builtin", "centered-triangle", "--out", str(tmp_path))
    assert code == 0
    rep = parse_report((tmp_path / "report.txt").read_text())
    assert rep["T"] == "Z4" and rep["T_f"] == "Z4"
    gen = str(tmp_path / "generator_1.txt")
    assert run(capsys, "order", "--builtin", "centered-triangle", "--expr", gen)[1].strip() == "4"
    code, out, _ = run(capsys, "simplify", "--builtin", "centered-triangle", "--expr", gen, "--tries", "500",
                       "--restarts", "2", "--out", str(tmp_path / "s.txt"))
    assert code == 0 and (tmp_path / "s.png").exists()
    code, out, _ = run(capsys, "reconstruct", "--builtin", "centered-triangle", "--expr", gen)
    assert code == 0 and out.startswith("# length")
    code, out, _ = run(capsys, "draw", "--builtin", "centered-triangle", "--expr", gen,
                       "--out", str(tmp_path / "g.dot"))
    assert code == 0 and (tmp_path / "g.png").exists()
    assert (tmp_path / "g.dot").read_text().startswith("digraph")


def test_draw_fsymbol(capsys, tmp_path):
    code, _, _ = run(capsys, "draw", "--builtin", "triangle", "--process", "[U3,U2^2]", "--out", str(tmp_path / "f.dot"))
    dot = (tmp_path / "f.dot").read_text()
    assert code == 0 and dot.count("[label=") - dot.count("->") == 4


def test_impose_model_file(capsys, tmp_path):
    path = tmp_path / "tet.ini"
    path.write_text(TET)
    code, out, _ = run(capsys, "impose", "--model", str(path), "--process", "U1^2", "--process", "U2^2",
                       "--process", "(U1 U2)^2")
    rep = parse_report(out)
    assert code == 0 and rep["generator_1"].endswith("modified_order 1") and rep["generator_2"].endswith("modified_order 1")
    code, out, _ = run(capsys, "impose", "--model", str(path), "--process", "U1^2", "--process", "U2^2")
    assert parse_report(out)["generator_1"].endswith("modified_order 2")


def test_abstract_model_file(capsys, tmp_path):
    path = tmp_path / "two.ini"
    path.write_text("[group]\ninvariants = 2,2\n[abstract]\npoints = 2\n"
                    "a ; 1,0 ; 0\nb ; 0,1 ; 0\nc ; 1,0 ; 1\nd ; 0,1 ; 1\n")
    code, out, _ = run(capsys, "compute", "--model", str(path))
    assert code == 0 and out.strip().endswith("T = Z2")


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "order", "--builtin", "triangle", "--process", "U9")[0] == 2
    assert run(capsys, "compute", "--builtin", "nonsense")[0] == 2
    bad = tmp_path / "bad.ini"
    bad.write_text("[complex]\nvertices = 3\n")
    assert run(capsys, "compute", "--model", str(bad))[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["compute"])
    assert exc.value.code == 2


def test_resource_limit_exit_code(capsys, monkeypatch):
    orig = cli.from_builtin
    monkeypatch.setattr(cli, "from_builtin", lambda b, G, p=None, gens=None: orig(b, G, p, gens, cap=3))
    assert run(capsys, "compute", "--builtin", "centered-triangle")[0] == 3
