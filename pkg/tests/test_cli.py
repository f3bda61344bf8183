import json

import numpy as np
import pytest

from daepl.cli import main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_p1(capsys, mtx_dir):
    code, out, _ = run(capsys, "analyze", mtx_dir / "E1.mtx", mtx_dir / "A1.mtx")
    rep = json.loads(out)
    assert code == 0
    assert rep["schema"] == 1 and rep["index"] == 0 and rep["wong_dims"] == [2, 1, 1]
    assert rep["U_dim"] == 1 and rep["generator_built"] is True
    assert rep["injectivity_gap"] == pytest.approx(1.0)


def test_analyze_p2(capsys, mtx_dir):
    code, out, _ = run(capsys, "analyze", mtx_dir / "E2.mtx", mtx_dir / "A2.mtx")
    rep = json.loads(out)
    assert code == 0
    assert rep["index"] == 1 and rep["wong_dims"] == [2, 1, 0] and rep["U_dim"] == 0
    assert rep["generator_built"] is True and rep["injectivity_gap"] is None


def test_analyze_dimension_mismatch(capsys, mtx_dir):
    code, _, err = run(capsys, "analyze", mtx_dir / "E1.mtx", mtx_dir / "I3.mtx")
    assert code == 1 and "dimension mismatch" in err


def test_analyze_bad_file(capsys, mtx_dir):
    (mtx_dir / "bad.mtx").write_text("%%MatrixMarket matrix array real general\n2 2\n1\n0\nq\n1\n")
    code, _, err = run(capsys, "analyze", mtx_dir / "bad.mtx", mtx_dir / "A1.mtx")
    assert code == 1 and "bad.mtx:5" in err


def test_analyze_singular_pencil(capsys, mtx_dir, tmp_path):
    import scipy.io

    scipy.io.mmwrite(str(tmp_path / "Z.mtx"), np.zeros((2, 2)))
    code, _, err = run(capsys, "analyze", tmp_path / "Z.mtx", tmp_path / "Z.mtx")
    assert code == 1 and "resolvent set probe failed" in err


def test_analyze_uncertified(capsys, tmp_path):
    import scipy.io

    # E = diag(1, 1e-14): index 0 on the probe grid, but the gap is below 1e3 * tau
    scipy.io.mmwrite(str(tmp_path / "E.mtx"), np.diag([1.0, 1e-14]))
    scipy.io.mmwrite(str(tmp_path / "A.mtx"), np.eye(2))
    code, _, err = run(capsys, "analyze", tmp_path / "E.mtx", tmp_path / "A.mtx", "--out", tmp_path / "r.json")
    rep = json.loads((tmp_path / "r.json").read_text())
    assert code == 2 and "injectivity gap" in err
    assert rep["generator_built"] is False and rep["index"] == 0 and rep["U_dim"] == 2
    assert any("not certified" in w for w in rep["warnings"])


def test_solve_both_routes(capsys, mtx_dir, tmp_path):
    prefix = tmp_path / "p1"
    code, out, _ = run(capsys, "solve", mtx_dir / "E1.mtx", mtx_dir / "A1.mtx", mtx_dir / "e1.txt",
                       "--t-end", 1, "--route", "both", "--out", prefix)
    assert code == 0
    summary = json.loads(out)
    assert summary["l2_discrepancy"] <= 1e-3
    assert summary["residual_max"]["semigroup"] <= 1e-6
    lines = (tmp_path / "p1_semigroup.csv").read_text().splitlines()
    assert lines[0] == "t,x_1,x_2,residual" and len(lines) == 202
    assert (tmp_path / "p1_laplace.csv").exists()
    assert json.loads((tmp_path / "p1_summary.json").read_text()) == summary


@pytest.mark.parametrize("pencil,x0", [("2", "e1"), ("1", "e2")])
def test_solve_inconsistent(capsys, mtx_dir, tmp_path, pencil, x0):
    out_dir = tmp_path / "out"
    code, _, err = run(capsys, "solve", mtx_dir / f"E{pencil}.mtx", mtx_dir / f"A{pencil}.mtx",
                       mtx_dir / f"{x0}.txt", "--out", out_dir / "bad")
    assert code == 2 and "initial value not consistent" in err
    assert not out_dir.exists()


def test_solve_contour_failure(capsys, mtx_dir, tmp_path):
    import scipy.io

    # zI + A is singular at z = 1.5 +- i; with Omega = 1 that is the last contour node
    scipy.io.mmwrite(str(tmp_path / "I.mtx"), np.eye(2))
    scipy.io.mmwrite(str(tmp_path / "A.mtx"), np.array([[-1.5, 1.0], [-1.0, -1.5]]))
    out_dir = tmp_path / "out"
    code, _, err = run(capsys, "solve", tmp_path / "I.mtx", tmp_path / "A.mtx", mtx_dir / "e1.txt",
                       "--route", "laplace", "--contour-rho", 1.5, "--contour-omega", 1.0,
                       "--contour-nodes", 64, "--out", out_dir / "o")
    assert code == 2 and "singular" in err
    assert not out_dir.exists()


def test_solve_bad_grid(capsys, mtx_dir, tmp_path):
    code, _, _ = run(capsys, "solve", mtx_dir / "E1.mtx", mtx_dir / "A1.mtx", mtx_dir / "e1.txt",
                     "--t-end", 1, "--dt", 0.3, "--out", tmp_path / "o")
    assert code == 1


def test_determinism(capsys, mtx_dir, tmp_path):
    outs = []
    for k in range(2):
        prefix = tmp_path / f"run{k}"
        run(capsys, "solve", mtx_dir / "E1.mtx", mtx_dir / "A1.mtx", mtx_dir / "e1.txt", "--out", prefix)
        run(capsys, "check", mtx_dir / "E1.mtx", mtx_dir / "A1.mtx", "--seed", 3, "--out", tmp_path / f"c{k}.json")
        outs.append([(tmp_path / f"run{k}_{s}").read_bytes() for s in ("semigroup.csv", "laplace.csv")]
                    + [(tmp_path / f"c{k}.json").read_bytes()])
    assert outs[0] == outs[1]


def test_check(capsys, mtx_dir):
    code, out, _ = run(capsys, "check", mtx_dir / "E1.mtx", mtx_dir / "A1.mtx", "--samples", 4)
    rep = json.loads(out)
    assert code == 0
    assert rep["membership_max"] <= 10 * rep["tau"]
    assert rep["generator_relation_max"] <= 1e-8 and rep["mild_residual_max"] <= 1e-6


def test_example(capsys, tmp_path):
    code, out, _ = run(capsys, "example", "--n", 64, "--n-list", "32,64", "--csv", tmp_path / "v.csv")
    rep = json.loads(out)
    assert code == 0 and rep["n"] == 64 and rep["index"] == 0
    assert all(b["result"] == "pass" for b in rep["bound_check"])
    lines = (tmp_path / "v.csv").read_text().splitlines()
    assert lines[0] == "x,v,projection" and len(lines) == 65


def test_example_bad_n(capsys):
    code, _, _ = run(capsys, "example", "--n", 7)
    assert code == 1
