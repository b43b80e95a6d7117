import csv
import subprocess
import sys

import numpy as np
import pytest

from spectra import generate_laplacian, load_matrix_market, write_matrix_market
from spectra.cli import main
from spectra.dense_oracle import dense_eigen


def _rows(path):
    with open(path) as fh:
        header = fh.readline()
        assert header.startswith("# spectra ") and header.strip().endswith("v1")
        return list(csv.DictReader(fh))


def test_end_to_end_against_oracle(tmp_path, capsys):
    code = main(["--generate", "grid2d:20", "--neig", "3", "--solver", "dacg-newton",
                 "--out", str(tmp_path)])
    assert code == 0
    rows = _rows(tmp_path / "summary.csv")
    assert len(rows) == 3 and all(r["converged"] == "1" for r in rows)
    lam = dense_eigen(generate_laplacian("grid-2d", 20, 20)).eigenvalues[:3]
    assert np.allclose([float(r["eigenvalue"]) for r in rows], lam, rtol=1e-7)
    report = (tmp_path / "report.txt").read_text()
    assert "sigma=" in report and "DACG=" in report and "NEWTON=" in report
    trace = _rows(tmp_path / "trace.csv")
    mvp = [int(r["cumulative_mvp"]) for r in trace]
    assert mvp == sorted(mvp)


def test_kmax_sweep(tmp_path):
    code = main(["--generate", "grid2d:20", "--neig", "4", "--kmax-sweep", "0,1,5",
                 "--out", str(tmp_path)])
    assert code == 0
    comp = _rows(tmp_path / "comparison.csv")
    assert [r["k_max"] for r in comp] == ["0", "1", "5"]
    assert len(_rows(tmp_path / "summary.csv")) == 12
    for run in ("0", "1", "5"):
        mvp = [int(r["cumulative_mvp"]) for r in _rows(tmp_path / "trace.csv") if r["k_max"] == run]
        assert mvp == sorted(mvp)


def test_itmax_pcg_sweep(tmp_path):
    assert main(["--generate", "grid2d:10", "--neig", "2", "--itmax-pcg-sweep", "5,20",
                 "--kmax-sweep", "0,5", "--out", str(tmp_path)]) == 0
    comp = _rows(tmp_path / "comparison.csv")
    assert [(r["itmax_pcg"], r["k_max"]) for r in comp] == [("5", "0"), ("5", "5"),
                                                           ("20", "0"), ("20", "5")]


@pytest.mark.parametrize("solver", ["jd", "dacg-pure"])
def test_other_solvers(tmp_path, solver):
    assert main(["--generate", "grid2d:10", "--neig", "3", "--solver", solver,
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "summary.csv")
    lam = dense_eigen(generate_laplacian("grid-2d", 10, 10)).eigenvalues[:3]
    assert np.allclose([float(r["eigenvalue"]) for r in rows], lam, rtol=1e-7)


def test_no_arguments_prints_usage():
    out = subprocess.run([sys.executable, "-m", "spectra"], capture_output=True, text=True)
    assert out.returncode == 1 and "usage:" in out.stderr


@pytest.mark.parametrize("argv", [
    ["--generate", "grid2d:5", "--kmax", "abc"],
    ["--generate", "grid2d:5", "--matrix", "x.mtx"],
    ["--generate", "cube:5"],
    ["--generate", "grid2d:0"],
    ["--generate", "grid2d:5", "--neig", "26"],
    ["--generate", "grid2d:5", "--tau-pcg", "2"],
    ["--matrix", "/nonexistent/file.mtx"],
    ["--neig", "3"],
])
def test_usage_errors(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 1


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["--generate", "grid2d:5", "--neig", "1", "--out", str(blocker / "sub")]) == 1


def test_partial_convergence_exit(tmp_path):
    assert main(["--generate", "grid2d:10", "--neig", "3", "--itmax", "1",
                 "--out", str(tmp_path)]) == 2


def test_summary_reproducible(tmp_path, monkeypatch):
    def strip_wall(path):
        rows = _rows(path)
        return [{k: v for k, v in r.items() if not k.endswith("_s")} for r in rows]

    args = ["--generate", "graph:200", "--neig", "3", "--seed", "7"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    a, b = (tmp_path / d / "summary.csv" for d in "ab")
    assert strip_wall(a) == strip_wall(b)
    # the env var wins over --seed
    monkeypatch.setenv("SPECTRA_SEED", "11")
    assert main(args + ["--out", str(tmp_path / "c")]) == 0
    c = [r["dacg_its"] for r in strip_wall(tmp_path / "c" / "summary.csv")]
    monkeypatch.delenv("SPECTRA_SEED")
    assert main(args[:-1] + ["11", "--out", str(tmp_path / "d")]) == 0
    assert c == [r["dacg_its"] for r in strip_wall(tmp_path / "d" / "summary.csv")]


def test_matrix_file_and_export(tmp_path):
    A = generate_laplacian("graph", 120, seed=2)
    p = tmp_path / "g.mtx"
    write_matrix_market(A, p)
    assert main(["--matrix", str(p), "--neig", "2", "--deflate-constant",
                 "--out", str(tmp_path / "o")]) == 0
    rows = _rows(tmp_path / "o" / "summary.csv")
    lam = dense_eigen(A).eigenvalues[1:3]
    assert np.allclose([float(r["eigenvalue"]) for r in rows], lam, rtol=1e-7)
    exported = tmp_path / "e.mtx"
    assert main(["--generate", "graph:120:2", "--neig", "1", "--export-matrix", str(exported),
                 "--out", str(tmp_path / "o2")]) == 0
    B = load_matrix_market(exported)
    assert np.array_equal(B.values, A.values) and np.array_equal(B.col_idx, A.col_idx)


def test_graph_shift_instead_of_deflation(tmp_path):
    assert main(["--generate", "graph:150", "--neig", "2", "--graph-shift", "1e-3",
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "summary.csv")
    assert float(rows[0]["eigenvalue"]) == pytest.approx(1e-3, rel=1e-6)
