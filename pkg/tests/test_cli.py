import json
import math
import subprocess
import sys

import pytest

from closedgeo.cli import main, parse_grid
from closedgeo.enumerator import load_table, save_table

FORM = "1,0.3,-0.7,0.2"


@pytest.fixture(scope="module")
def classes10(tmp_path_factory, table10):
    p = tmp_path_factory.mktemp("cli") / "classes10.csv"
    save_table(table10, p)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_grid_tokens():
    assert parse_grid("e8, 100,e10.5") == [math.exp(8), 100.0, math.exp(10.5)]


def test_build(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, text, _ = run(capsys, "build", "--group", "bolza", "--x-max", "6", "--out", str(out))
    assert code == 0
    assert "classes       96" in text
    assert len(load_table(out)) == 96


def test_build_below_systole(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, err = run(capsys, "build", "--x-max", "2", "--out", str(out))
    assert code == 0 and "warning" in err
    assert len(load_table(out)) == 0


def test_build_cache_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("GEODESIC_CACHE_DIR", str(tmp_path))
    assert run(capsys, "build", "--x-max", "4")[0] == 0
    assert (tmp_path / "classes-bolza.csv").exists()
    assert run(capsys, "pgt", "--grid", "3.5,4")[0] == 0


def test_build_usage_errors(tmp_path):
    for bad in (["--x-max", "0"], ["--x-max", "-1"], ["--x-max", "abc"]):
        with pytest.raises(SystemExit) as exc:
            main(["build", *bad, "--out", str(tmp_path / "x.csv")])
        assert exc.value.code == 2


def test_capacity_exit_code(tmp_path, capsys):
    code, _, err = run(capsys, "build", "--x-max", "8", "--cap", "1000", "--out", str(tmp_path / "x.csv"))
    assert code == 1 and "CapacityExceeded" in err


def test_stats(classes10, capsys, tmp_path):
    code, text, _ = run(capsys, "stats", "--classes", classes10, "--form", FORM, "--grid", "e8,e9,e10")
    assert code == 0
    rep = json.loads(text)
    assert len(rep["ks"]) == 3
    for k in ("group", "x_max", "form", "T_grid", "pgt", "moments", "moment_ratios", "histogram"):
        assert k in rep
    assert len(rep["histogram"]["counts"]) == 41
    assert rep["all_classes"] is False
    code, text2, _ = run(capsys, "stats", "--classes", classes10, "--form", FORM, "--grid", "e8,e9,e10")
    assert text2 == text
    code, text3, _ = run(capsys, "stats", "--classes", classes10, "--form", FORM, "--grid", "e10",
                         "--all-classes")
    assert json.loads(text3)["all_classes"] is True
    out = tmp_path / "r.json"
    assert run(capsys, "stats", "--classes", classes10, "--form", FORM, "--grid", "e10",
               "--out", str(out))[0] == 0
    assert (tmp_path / "r.histogram.csv").exists() and (tmp_path / "r.classes.csv").exists()


def test_stats_errors(classes10, capsys, tmp_path):
    assert run(capsys, "stats", "--classes", classes10, "--form", "0,0,0,0")[0] == 2
    assert run(capsys, "stats", "--classes", classes10, "--form", "1,2")[0] == 2
    assert run(capsys, "stats", "--classes", classes10, "--form", FORM, "--grid", "e12")[0] == 1
    assert run(capsys, "stats", "--classes", str(tmp_path / "none.csv"), "--form", FORM)[0] == 1
    bad = tmp_path / "bad.csv"
    bad.write_text(open(classes10).read().replace("v1", "v9", 1))
    code, _, err = run(capsys, "stats", "--classes", str(bad), "--form", FORM)
    assert code == 1 and "FormatVersionMismatch" in err


def test_zeta(classes10, capsys):
    code, text, _ = run(capsys, "zeta", "--classes", classes10, "--form", FORM, "--s", "2",
                        "--eps", "0.3")
    assert code == 0
    rep = json.loads(text)
    assert rep["splitting_residual"] < 1e-9
    assert rep["product_log_derivative"]["abs_diff"] < 1e-6
    code, text, _ = run(capsys, "zeta", "--classes", classes10, "--form", FORM, "--s", "2",
                        "--deriv", "3")
    rep = json.loads(text)
    assert abs(complex(rep["E_derivatives"]["3"]["re"], rep["E_derivatives"]["3"]["im"])) <= 1e-14
    code, text, _ = run(capsys, "zeta", "--classes", classes10, "--form", FORM, "--s", "2+10i")
    assert code == 0 and json.loads(text)["s"] == {"re": 2.0, "im": 10.0}


def test_zeta_divergent(classes10, capsys):
    code, text, _ = run(capsys, "zeta", "--classes", classes10, "--form", FORM, "--s", "0.8")
    assert code == 0
    rep = json.loads(text)
    assert rep["E"]["divergent"] and rep["E"]["error"] == "DivergentRegion"
    assert not rep["A1"]["divergent"]
    assert rep["splitting_residual"] is None
    code, text, _ = run(capsys, "zeta", "--classes", classes10, "--form", FORM, "--s", "0.4")
    assert json.loads(text)["A2"]["divergent"]


def test_pgt(classes10, capsys, tmp_path):
    out = tmp_path / "p.csv"
    code, text, _ = run(capsys, "pgt", "--classes", classes10, "--grid", "6,8,10", "--out", str(out))
    assert code == 0
    lines = text.strip().splitlines()
    assert len(lines) == 4
    assert len(out.read_text().strip().splitlines()) == 4
    code, _, err = run(capsys, "pgt", "--classes", classes10, "--grid", "12")
    assert code == 1 and "rebuild" in err


def test_console_script(classes10):
    out = subprocess.run([sys.executable, "-m", "closedgeo.cli", "pgt", "--classes", classes10],
                         capture_output=True, text=True)
    assert out.returncode == 0 and "ratio" in out.stdout
