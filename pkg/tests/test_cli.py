import re
import subprocess
import sys

import pytest

from polysfem import benchmarks as bm
from polysfem import cli

ERROR_LINE = re.compile(r'^error code=(\d) type=(\w+) message="[^"\n]*"$')


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_patch3d_succeeds(tmp_path, capsys):
    code, out, err = run(["patch3d", "--out", str(tmp_path)], capsys)
    assert code == 0 and err == ""
    assert "patch_test=PASS max_err<1e-10" in out
    assert (tmp_path / "patch3d.csv").read_text().startswith("formulation,max_err\n")


def test_convergence_csv_layout(tmp_path, capsys):
    code, _, _ = run(["cantilever2d", "--levels", "2", "--out", str(tmp_path)], capsys)
    assert code == 0
    lines = (tmp_path / "cantilever2d.csv").read_text().splitlines()
    assert lines[0] == "h,nelem,ndof,err_l2,err_h1"
    assert len(lines) == 4
    assert re.fullmatch(r"# slope_l2=\S+ slope_h1=\S+", lines[-1])
    assert (tmp_path / "cantilever2d.svg").read_text().startswith("<svg")


def test_csv_is_deterministic(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["golden-matrices", "--out", str(tmp_path / d)], capsys)[0] == 0
    assert (tmp_path / "a" / "golden_matrices.csv").read_bytes() == (tmp_path / "b" / "golden_matrices.csv").read_bytes()


def test_alpha_study_single_entry(tmp_path, capsys):
    code, out, _ = run(["alpha-study", "--alpha", "0.1", "--mesh", "cantilever_voronoi_100", "--out", str(tmp_path)],
                       capsys)
    assert code == 0
    rows = (tmp_path / "alpha_study.csv").read_text().splitlines()
    assert rows[0] == "alpha,err_l2,err_h1"
    assert float(rows[1].split(",")[0]) == 0.1
    assert len(rows) == 3  # header, one row, summary comment
    assert "argmin_l2=0.1" in out
    assert not (tmp_path / "alpha_study.svg").exists()


@pytest.mark.parametrize("argv", [
    ["no-such-benchmark"],
    ["patch2d", "--mesh", "missing_mesh_file.json"],
    ["patch2d", "--levels", "2"],
    ["golden-matrices", "--formulation", "stab"],
    ["cantilever2d", "--alpha", "-0.1"],
    ["cantilever2d", "--alpha", "0.1", "0.2"],
    ["cantilever2d", "--levels", "0"],
    ["alpha-study", "--alpha", "0.1", "0"],
    ["alpha-study", "--mesh", "cantilever_voronoi_100", "cantilever_voronoi_200"],
    ["mesh-info"],
    ["cantilever2d", "--formulation", "xfem", "--levels", "1"],
    ["cantilever2d", "--mesh", "patch2d"],
    ["edge-crack", "--formulation", "stab", "--levels", "1"],
    ["patch2d", "--seed", "abc"],
])
def test_configuration_errors(argv, tmp_path, capsys):
    code, out, err = run(argv + ["--out", str(tmp_path)], capsys)
    assert code == 2
    lines = err.strip().splitlines()
    assert len(lines) == 1
    m = ERROR_LINE.match(lines[0])
    assert m and m.group(1) == "2"
    assert not list(tmp_path.iterdir())


def test_failed_check_exits_three(tmp_path, capsys, monkeypatch):
    def failing(**kw):
        rep = bm.BenchmarkReport("patch2d", ("formulation", "max_err"), [("stab", 1.0)])
        rep.passed = False
        return rep

    monkeypatch.setattr(bm, "patch2d", failing)
    code, _, err = run(["patch2d", "--out", str(tmp_path)], capsys)
    assert code == 3
    assert ERROR_LINE.match(err.strip()).group(2) == "NumericalFailure"


def test_solver_failure_exits_three(tmp_path, capsys, monkeypatch):
    from polysfem.errors import ConstraintDeficiencyError

    def singular(**kw):
        raise ConstraintDeficiencyError("2 zero-energy mode(s) remain", zero_modes=2)

    monkeypatch.setattr(bm, "patch3d", singular)
    code, _, err = run(["patch3d", "--out", str(tmp_path)], capsys)
    assert code == 3
    assert 'type=ConstraintDeficiencyError message="2 zero-energy mode(s) remain"' in err


def test_run_benchmark_without_output():
    report, files = cli.run_benchmark(cli.RunConfig("stability-spectrum", out=None))
    assert files == []
    assert report.summary["zero_stabilized"] == 6


def test_every_benchmark_has_a_driver():
    for entry in cli.BENCHMARKS.values():
        assert callable(getattr(bm, entry.driver))


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "polysfem", "mesh-info", "--mesh", "warped_cube", "--out",
                           str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("warped_cube: dim=3 nodes=16 elements=7")
