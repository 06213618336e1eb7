"""Console entry points: report shape, exit codes, and determinism."""

import json

import numpy as np
import pytest

from hsclab import cli, dsl, warp


def run_cli(capsys, *argv):
    """Invoke main() in process; returns (exit_code, parsed stdout report)."""
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_curvature_reference_example(capsys):
    code, rep = run_cli(capsys, "curvature", "--catalog", "poincare",
                        "--point", "0,0", "--dir", "1,0")
    assert code == 0
    assert rep["hsc"] == pytest.approx(-4.0, abs=1e-12)
    assert rep["schema"] == 1
    assert rep["seed"] == 0
    assert rep["config"]["catalog"] == "poincare"


def test_curvature_accepts_complex_literals(capsys):
    code, rep = run_cli(capsys, "curvature", "--catalog", "fs_affine",
                        "--point", "0.3+0.1i", "--dir", "1i")
    assert code == 0
    assert rep["hsc"] == pytest.approx(4.0, abs=1e-9)


def test_curvature_without_direction(capsys):
    code, rep = run_cli(capsys, "curvature", "--catalog", "flat(2)",
                        "--point", "0,0,0,0")
    assert code == 0
    assert "hsc" not in rep
    assert rep["tensor_max_abs"] == 0.0


def test_lemma1_reference_example(capsys):
    code, rep = run_cli(capsys, "lemma1", "--k0", "8", "--k1", "1",
                        "--n", "2", "--s", "1", "--trials", "1000")
    assert code == 0
    assert rep["weights"]["required_ratio"] == 312.0
    assert rep["identities"]["terms_equalized"]
    assert rep["product_inequalities"]["violations"] == 0
    assert rep["bound_check"]["violations"] == 0
    assert rep["ok"]


def test_lemma1_below_requirement_skips_bound(capsys):
    code, rep = run_cli(capsys, "lemma1", "--k0", "8", "--k1", "1",
                        "--n", "2", "--s", "1", "--k2", "10",
                        "--trials", "500")
    assert code == 0
    assert "skipped" in rep["bound_check"]


def test_lemma2_defaults(capsys):
    code, rep = run_cli(capsys, "lemma2")
    assert code == 0
    assert rep["threshold"]["threshold"] == pytest.approx(1.0, abs=1e-6)
    assert rep["formula_worst_rel_error"] <= 1e-9
    assert rep["decay"]["limit_curvature"] == pytest.approx(4.0)


def test_example1_reference_invocation(capsys):
    code, rep = run_cli(capsys, "example1", "--lambdas", "0.5,1,5,50",
                        "--seed", "0")
    assert code == 0
    wit = rep["report"]["witnesses"]
    assert len(wit) == 4
    assert all(w["witness"]["value"] < -1e-8 for w in wit)
    assert rep["report"]["base"]["positive"]
    assert rep["ok"]


def test_witness_exits_zero_when_absent(capsys):
    code, rep = run_cli(capsys, "witness", "--catalog", "fs_affine",
                        "--budget", "500")
    assert code == 0
    assert rep["found"] is False and rep["witness"] is None


def test_witness_reports_negative_direction(capsys):
    code, rep = run_cli(capsys, "witness", "--catalog", "poincare",
                        "--budget", "500")
    assert code == 0
    assert rep["found"] and rep["witness"]["value"] < -1e-8


def test_scan_writes_csv(tmp_path, capsys):
    out = tmp_path / "scan.csv"
    code, rep = run_cli(capsys, "scan", "--catalog", "paper_base",
                        "--grid", "3", "--dirs", "8", "--starts", "1",
                        "--iters", "20", "--csv", str(out))
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "index,re1,im1,min_hsc"
    assert len(lines) == 1 + rep["scan"]["points_scanned"]


def test_warp_demo_checks(capsys):
    code, rep = run_cli(capsys, "warp", "--lam", "4", "--trials", "100")
    assert code == 0
    assert rep["mu0_search"] == 1.0
    assert rep["determinant"]["ok"] and rep["growth"]["ok"]
    assert rep["validation"]["min_eigenvalue"] > 0


def test_warp_rejects_indefinite_fibration(tmp_path, capsys):
    path = tmp_path / "bad.json"
    f = warp.FibrationSpec(
        "bad", 1, 1, ((dsl.parse("1", 2),),), ((dsl.parse("-1", 1),),),
        0.0, (dsl.Rect(-0.5, 0.5, -0.5, 0.5),) * 2)
    warp.save_fibration(f, path)
    code, rep = run_cli(capsys, "warp", "--file", str(path))
    assert code == 1
    assert "error" in rep and rep["ok"] is False


def test_reports_are_byte_identical(capsys):
    args = ("curvature", "--catalog", "paper_G(1)", "--point",
            "0.1,0.2,0.3,-0.1", "--dir", "1,0,0,1")
    cli.main(list(args))
    first = capsys.readouterr().out
    cli.main(list(args))
    second = capsys.readouterr().out
    assert first == second and first


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as err:
        cli.main(["--version"])
    assert err.value.code == 0


@pytest.mark.parametrize("argv", [
    ("curvature", "--catalog", "poincare", "--point", "0,0,0"),
    ("curvature", "--catalog", "nosuch", "--point", "0,0"),
    ("curvature", "--catalog", "poincare", "--point", "2,0"),
    ("curvature", "--point", "0,0"),
    ("scan", "--catalog", "poincare", "--box", "1:2"),
    ("nosuchcommand",),
])
def test_usage_errors_exit_two(capsys, argv):
    with pytest.raises(SystemExit) as err:
        cli.main(list(argv))
    assert err.value.code == 2
    assert not capsys.readouterr().out.strip()  # diagnostics go to stderr


def test_point_parser_pairs_and_literals():
    got = cli.parse_complex_vector("1,0,0,1", 2, "point")
    np.testing.assert_array_equal(got, [1.0, 1.0j])
    got = cli.parse_complex_vector("0.5+0.1i,2i", 2, "point")
    np.testing.assert_array_equal(got, [0.5 + 0.1j, 2.0j])
    got = cli.parse_complex_vector("0.25,-0.5", 1, "point")
    np.testing.assert_array_equal(got, [0.25 - 0.5j])
    with pytest.raises(SystemExit):
        cli.parse_complex_vector("1,2,3", 2, "point")
