import numpy as np
import pytest

from polysfem import benchmarks as bm
from polysfem.benchmarks import BenchmarkReport, ConfigError
from polysfem.mesh import polygon_geometry


def test_report_csv_and_files(tmp_path):
    rep = BenchmarkReport("demo", ("h", "err"), [(1.0, 0.5), (0.5, 0.125)], summary={"slope": 2.0})
    rep.plot = {"x": "h", "y": ["err"]}
    text = rep.to_csv()
    assert text.splitlines()[0] == "h,err"
    assert text.splitlines()[-1].startswith("# slope=")
    files = rep.write(tmp_path)
    assert [f.name for f in files] == ["demo.csv", "demo.svg"]
    assert "<polyline" in files[1].read_text()
    np.testing.assert_array_equal(rep.column("err"), [0.5, 0.125])


def test_single_row_report_has_no_plot(tmp_path):
    rep = BenchmarkReport("one", ("h", "err"), [(1.0, 0.5)])
    rep.plot = {"x": "h", "y": ["err"]}
    assert [f.name for f in rep.write(tmp_path)] == ["one.csv"]


def test_random_polygons_are_convex_and_ccw():
    rng = np.random.default_rng(0)
    for n in range(3, 11):
        p = bm.random_convex_polygon(rng, n)
        assert len(p) == n
        assert polygon_geometry(p).area > 0
        e = np.roll(p, -1, axis=0) - p
        cross = e[:, 0] * np.roll(e[:, 1], -1) - e[:, 1] * np.roll(e[:, 0], -1)
        assert np.all(cross > 0)


def test_unknown_fixture():
    with pytest.raises(ConfigError):
        bm.fixture_path("no_such_mesh")


@pytest.mark.parametrize("form", ["vem", "sfem:1"])
def test_patch2d_other_formulations(form):
    assert bm.patch2d(form).passed


def test_two_subcells_need_quadrilaterals():
    with pytest.raises(ValueError):
        bm.patch2d("sfem:2")


def test_patch3d_vem():
    assert bm.patch3d("vem").passed


def test_mesh_info():
    rep = bm.mesh_info(["warped_cube", "inclined_crack_30"])
    assert rep.rows[0][:4] == ("warped_cube", 3, 16, 7)
    assert rep.rows[1][1] == 2 and rep.rows[1][5] == 2


def test_golden_matrices_all_pass():
    assert bm.golden_matrices().passed


def test_fem_baseline_on_l_shape():
    rep = bm.l_shape("fem", levels=2)
    assert len(rep.rows) == 2
    assert rep.rows[1][3] < rep.rows[0][3]


@pytest.mark.parametrize("beta", [0, 90])
def test_symmetric_inclined_crack_has_no_mode_two(beta):
    rep = bm.inclined_crack(betas=(beta,), meshes=[f"inclined_crack_{beta}"])
    _, _, kia, kib, _, kiia, kiib = rep.rows[0]
    assert abs(kiia) < 2e-3 and abs(kiib) < 2e-3
    assert kia > 0 and kib > 0


def test_crack_benchmarks_need_sbfem():
    with pytest.raises(ConfigError):
        bm.edge_crack("stab", levels=1)
    with pytest.raises(ConfigError):
        bm.inclined_crack(betas=(0, 15), meshes=["inclined_crack_0"])


def test_alpha_grid_validation():
    with pytest.raises(ConfigError):
        bm.alpha_study(alpha_grid=())
    with pytest.raises(ConfigError):
        bm.alpha_study(alpha_grid=(0.1, -1.0))
