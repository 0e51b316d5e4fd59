import json
import subprocess
import sys

import pytest

from clarktorus.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_construct_json(tmp_path, capsys):
    code, out, _ = run(capsys, "construct", "--phi", "coordinate", "--alpha", "0.25", "--nodes", "256", "--output-dir", str(tmp_path))
    assert code == 0
    rep = json.loads(out)
    assert rep["command"] == "construct" and rep["certificate"]["representation"] == "product"
    assert all(c["pass"] for c in rep["checks"])
    art = json.loads((tmp_path / "construct-coordinate-measure.json").read_text())
    assert art["measure"]["type"] == "product"


def test_construct_graph_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "construct", "--phi", "rational_example", "--nodes", "128", "--format", "csv", "--output-dir", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "construct-rational_example-measure.csv").read_text().splitlines()
    assert lines[0] == "angle,branch,eta_angle,weight" and len(lines) > 500


def test_reports_are_byte_identical(tmp_path, capsys):
    argv = ("construct", "--phi", "product", "--alpha", "0.1", "--nodes", "64", "--output-dir", str(tmp_path))
    first = run(capsys, *argv)[1]
    art = (tmp_path / "construct-product-measure.json").read_bytes()
    second = run(capsys, *argv)[1]
    assert first == second
    assert art == (tmp_path / "construct-product-measure.json").read_bytes()


def test_output_dir_from_environment(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("CLARKTORUS_OUTPUT_DIR", str(tmp_path / "env"))
    assert run(capsys, "construct", "--phi", "coordinate", "--nodes", "256")[0] == 0
    assert (tmp_path / "env" / "construct-coordinate-measure.json").exists()


def test_verify_product(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--phi", "product", "--alpha", "0.3", "--nodes", "256", "--format", "csv", "--output-dir", str(tmp_path))
    rep = json.loads(out)
    assert code == 0, rep["failing"]
    names = [c["name"] for c in rep["checks"]]
    assert "model-space-annihilation" in names and "disintegration-over-alpha" in names
    assert (tmp_path / "verify-product.csv").read_text().startswith("name,residual,threshold,pass")


def test_verify_non_inner_skips_model_space_checks(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--phi", "halfsum", "--nodes", "256", "--output-dir", str(tmp_path))
    rep = json.loads(out)
    assert code == 0, rep["failing"]
    skipped = {c["name"] for c in rep["checks"] if c.get("skipped")}
    assert {"support-on-level-set", "isometry-kernel-gram", "model-space-annihilation"} <= skipped


def test_scan_csv(tmp_path, capsys):
    code, out, _ = run(capsys, "scan", "--phi", "product", "--grid", "4", "--maxdeg", "2", "--nodes", "64", "--format", "csv", "--output-dir", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "scan-product.csv").read_text().splitlines()
    assert lines[0] == "alpha_turns,rho_maxdeg,poisson_match_residual,continuity_increment"
    assert len(lines) == 5
    assert float(lines[1].split(",")[1]) < 1e-10


def test_coefficient_file(tmp_path, capsys):
    path = tmp_path / "phi.json"
    grid = lambda shape, c: {"shape": shape, "coefficients": c}
    data = {"name": "prod", "dimension": 2, "numerator": grid([2, 2], [[0, 0], [0, 0], [0, 0], [1, 0]]), "denominator": grid([1, 1], [[1, 0]])}
    path.write_text(json.dumps(data))
    code, out, err = run(capsys, "construct", "--phi", str(path), "--nodes", "256", "--output-dir", str(tmp_path))
    assert code == 0, err
    assert json.loads(out)["certificate"]["representation"] == "graph"


def test_underresolved_construction_exits_1(tmp_path, capsys):
    # 64 nodes cannot resolve the Poisson kernel at the panel radius 0.9
    code, out, _ = run(capsys, "construct", "--phi", "coordinate", "--nodes", "64", "--output-dir", str(tmp_path))
    rep = json.loads(out)
    assert code == 1 and not rep["certificate"]["accepted"]


@pytest.mark.parametrize(
    "argv",
    [
        ["construct", "--phi", "nope", "--output-dir", "{tmp}"],
        ["scan", "--phi", "product", "--grid", "0", "--output-dir", "{tmp}"],
        ["scan", "--phi", "coordinate", "--maxdeg", "40", "--output-dir", "{tmp}"],
        ["construct", "--phi", "{tmp}/missing.json", "--output-dir", "{tmp}"],
    ],
)
def test_usage_errors_exit_2(argv, tmp_path, capsys):
    code, out, err = run(capsys, *[a.format(tmp=tmp_path) for a in argv])
    assert code == 2 and out == "" and "error" in err


@pytest.mark.parametrize("flag", [["--nodes", "100"], ["--nodes", "32"], ["--format", "xml"], []])
def test_argparse_errors_exit_2(flag, capsys):
    argv = ["construct", "--phi", "product", *flag] if flag else ["construct"]
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "clarktorus", "construct", "--phi", "coordinate", "--nodes", "256", "--output-dir", str(tmp_path)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["config"]["phi"] == "coordinate"
