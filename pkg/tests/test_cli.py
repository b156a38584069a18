import csv
import io

import pytest

from symlab import shapes
from symlab.cli import cmd_demo, cmd_run, main
from symlab.config import ConfigError, config_from_dict, load_config, parse_subspace
from symlab.sets import FinitePointSet
from symlab.sets.textio import dump_set

TWO_POINT = """\
input: |
  rep=pointset dim=2
  point -1 0
  point 1 0
operator: minkowski
family: [90]
schedule: cyclic
max_steps: 8
tol: 1.0e-9
outputs:
  csv: {csv}
  svg: "{svg}"
"""


def write(tmp_path, text, name="cfg.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_writes_csv_and_frames(tmp_path):
    cfg = write(tmp_path, TWO_POINT.format(csv="run.csv", svg="frames/s{step}.svg"))
    out = io.StringIO()
    assert cmd_run(cfg, out) == 0
    rows = list(csv.DictReader(open(tmp_path / "run.csv")))
    assert len(rows) == 8
    frames = sorted(p.name for p in (tmp_path / "frames").iterdir())
    assert frames == sorted(f"s{m}.svg" for m in range(9))
    assert (tmp_path / "frames" / "s0.svg").read_text().startswith("<svg")


def test_run_csv_is_byte_identical(tmp_path):
    a = write(tmp_path, TWO_POINT.format(csv="a.csv", svg="fa/{step}.svg"), "a.yaml")
    b = write(tmp_path, TWO_POINT.format(csv="b.csv", svg="fb/{step}.svg"), "b.yaml")
    assert cmd_run(a, io.StringIO()) == 0 and cmd_run(b, io.StringIO()) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "fa" / "3.svg").read_bytes() == (tmp_path / "fb" / "3.svg").read_bytes()


def test_run_grid_checks_volume(tmp_path):
    (tmp_path / "g.txt").write_text(dump_set(shapes.l_shape(4, 3, 2, 1)))
    cfg = write(tmp_path, "input: g.txt\noperator: steiner\nfamily: [x, y]\nmax_steps: 4\n")
    out = io.StringIO()
    assert cmd_run(cfg, out) == 0
    assert "PASS  Steiner symmetrization preserves volume" in out.getvalue()


def test_config_errors(tmp_path, capsys):
    bad = write(tmp_path, TWO_POINT.format(csv="x.csv", svg="no_placeholder.svg"))
    assert cmd_run(bad, io.StringIO()) == 1
    assert "{step}" in capsys.readouterr().err
    assert cmd_run(str(tmp_path / "missing.yaml"), io.StringIO()) == 1
    typo = write(tmp_path, "input: |\n  rep=pointset dim=2\n  point 0 0\noperater: minkowski\n", "t.yaml")
    assert cmd_run(typo, io.StringIO()) == 1
    mismatch = write(tmp_path, "input: |\n  rep=pointset dim=2\n  point 0 0\n"
                     "operator: steiner\nfamily: [0]\n", "m.yaml")
    assert cmd_run(mismatch, io.StringIO()) == 1


def test_config_reports_line(tmp_path):
    p = write(tmp_path, "operator: minkowski\nfamily: [x\n")
    with pytest.raises(ConfigError) as e:
        load_config(p)
    assert "line" in str(e.value)


def test_config_from_dict_and_subspaces():
    cfg = config_from_dict({"input": FinitePointSet([[0, 0], [1, 2]]), "operator": "minkowski",
                            "family": [0, 90], "schedule": "random seed=7", "max_steps": 5})
    assert cfg.spec.max_steps == 5 and len(cfg.spec.family) == 2
    assert parse_subspace("xz", 3, "family[0]").axes == (0, 2)
    with pytest.raises(ConfigError):
        parse_subspace(45, 3, "family[0]")
    with pytest.raises(ConfigError):
        config_from_dict({"input": FinitePointSet([[0, 0]]), "family": [0], "max_steps": -1})


def test_demo_exit_codes(capsys):
    assert cmd_demo("klain-two-point") == 0
    assert "PASS" in capsys.readouterr().out
    assert cmd_demo("no-such-demo") == 1


def test_render(tmp_path):
    src = tmp_path / "s.txt"
    src.write_text(dump_set(shapes.annulus(6, 1)))
    assert main(["render", str(src), str(tmp_path / "s.svg")]) == 0
    first = (tmp_path / "s.svg").read_bytes()
    assert main(["render", str(src), str(tmp_path / "s.svg")]) == 0
    assert (tmp_path / "s.svg").read_bytes() == first
    cube = tmp_path / "c.txt"
    cube.write_text(dump_set(shapes.hollow_shell(4)))
    assert main(["render", str(cube), str(tmp_path / "c.svg")]) == 1
    assert main(["render", str(cube), str(tmp_path / "c.svg"), "--slice", "0"]) == 0
    assert main(["render", str(tmp_path / "nope.txt"), str(tmp_path / "n.svg")]) == 1
