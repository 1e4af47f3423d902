import json
import math

import numpy as np
import pytest

from conftest import load_fixture
from deltacut import (
    CELL_BUDGET,
    CellBudgetExceeded,
    GridSpec,
    Pose,
    PrescribedWorkspace,
    compute_workspace,
    coverage,
    default_grid_spec,
    dump_grid,
    is_reachable,
    is_reachable_many,
    load_grid,
    load_prescribed,
    save_prescribed,
    volume_estimate,
)


def reference_spec():
    return GridSpec(-300.0, 300.0, -300.0, 300.0, -550.0, -50.0, 10.0)


def test_grid_spec_dims_round_up():
    spec = GridSpec(0.0, 25.0, 0.0, 10.0, -10.0, -1.0, 10.0)
    assert spec.dims == (3, 1, 1)


def test_grid_spec_cell_centers():
    spec = GridSpec(0.0, 30.0, -10.0, 10.0, -20.0, 0.0, 10.0)
    assert list(spec.axis_centers("x")) == [5.0, 15.0, 25.0]
    assert spec.cell_center(0, 1, 0) == (5.0, 5.0, -15.0)


@pytest.mark.parametrize("kwargs", [
    dict(x_min=0.0, x_max=0.0, y_min=0.0, y_max=1.0, z_min=0.0, z_max=1.0, resolution=1.0),
    dict(x_min=0.0, x_max=1.0, y_min=0.0, y_max=1.0, z_min=0.0, z_max=1.0, resolution=0.0),
    dict(x_min=0.0, x_max=1.0, y_min=2.0, y_max=1.0, z_min=0.0, z_max=1.0, resolution=1.0),
    dict(x_min=0.0, x_max=math.nan, y_min=0.0, y_max=1.0, z_min=0.0, z_max=1.0, resolution=1.0),
])
def test_grid_spec_rejects_degenerate_boxes(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_cell_budget_guard():
    with pytest.raises(CellBudgetExceeded):
        GridSpec(-1000.0, 1000.0, -1000.0, 1000.0, -1000.0, 0.0, 0.1)
    assert CELL_BUDGET == 100_000_000


def test_reference_grid_matches_brute_force_fixture(g0):
    record = load_fixture("workspace_g0_res10.json")
    spec = reference_spec()
    assert list(spec.dims) == record["dims"]
    grid = compute_workspace(g0, spec)
    assert grid.occupied_count == record["occupied_count"]
    assert volume_estimate(grid) == record["volume_mm3"]


def test_vector_scan_agrees_with_scalar_solver(g0):
    rng = np.random.default_rng(31415)
    pts = rng.uniform([-350, -350, -600], [350, 350, 0], size=(5000, 3))
    flags = is_reachable_many(g0, pts)
    for i in range(0, 5000, 7):
        want = is_reachable(g0, Pose(*pts[i]))
        assert bool(flags[i]) == want


def test_coverage_matches_fixture(g0):
    record = load_fixture("prescribed_mixed10.json")
    prescribed = PrescribedWorkspace(points=np.array(record["points"]))
    assert coverage(g0, prescribed) == record["coverage_g0"]


def test_coverage_of_unreachable_set_is_zero(g0):
    pts = PrescribedWorkspace(points=np.array([[0.0, 0.0, -900.0], [700.0, 0.0, -300.0]]))
    assert coverage(g0, pts) == 0.0


def test_prescribed_validation():
    with pytest.raises(ValueError):
        PrescribedWorkspace(points=np.zeros((0, 3)))
    with pytest.raises(ValueError):
        PrescribedWorkspace(points=np.array([[0.0, 1.0]]))
    with pytest.raises(ValueError):
        PrescribedWorkspace(points=np.array([[0.0, 1.0, math.inf]]))


def test_prescribed_file_round_trip(tmp_path):
    pts = PrescribedWorkspace(points=np.array([[1.0, 2.0, -3.0], [4.0, 5.0, -6.0]]))
    path = tmp_path / "points.json"
    save_prescribed(pts, path)
    again = load_prescribed(path)
    assert np.array_equal(again.points, pts.points)


def test_load_prescribed_accepts_bare_list(tmp_path):
    path = tmp_path / "points.json"
    path.write_text("[[1.0, 2.0, -3.0]]", encoding="utf-8")
    assert len(load_prescribed(path)) == 1


def test_default_grid_spec_covers_the_reach(g0):
    spec = default_grid_spec(g0)
    radius = g0.a + g0.r_f + g0.r_e
    assert spec.x_min == -radius and spec.x_max == radius
    assert spec.y_min == -radius and spec.y_max == radius
    assert spec.z_min == -(g0.r_f + g0.r_e) and spec.z_max == 0.0
    assert spec.resolution == 10.0


def test_grid_dump_round_trip(tmp_path, g0):
    spec = GridSpec(-120.0, 120.0, -120.0, 120.0, -400.0, -200.0, 20.0)
    grid = compute_workspace(g0, spec)
    path = tmp_path / "grid.txt"
    dump_grid(grid, path, geometry=g0)

    again = load_grid(path)
    assert again.spec == grid.spec
    assert np.array_equal(again.occupancy, grid.occupancy)

    second = tmp_path / "grid2.txt"
    dump_grid(again, second, geometry=g0)
    assert path.read_bytes() == second.read_bytes()


def test_grid_dump_header_is_json_with_geometry(tmp_path, g0):
    spec = GridSpec(-60.0, 60.0, -60.0, 60.0, -320.0, -280.0, 20.0)
    grid = compute_workspace(g0, spec)
    path = tmp_path / "grid.txt"
    dump_grid(grid, path, geometry=g0)
    header = json.loads(path.read_text(encoding="utf-8").splitlines()[0])
    assert header["dims"] == list(spec.dims)
    assert header["geometry"]["rf"] == g0.r_f
    assert header["order"].startswith("x fastest")


def test_load_grid_rejects_corrupt_rows(tmp_path, g0):
    spec = GridSpec(-60.0, 60.0, -60.0, 60.0, -320.0, -280.0, 20.0)
    grid = compute_workspace(g0, spec)
    path = tmp_path / "grid.txt"
    dump_grid(grid, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    lines[1] = lines[1][:-1] + "2"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_grid(path)


def test_occupied_cells_are_actually_reachable(g0):
    spec = GridSpec(-150.0, 150.0, -150.0, 150.0, -450.0, -150.0, 30.0)
    grid = compute_workspace(g0, spec)
    xs = spec.axis_centers("x")
    ys = spec.axis_centers("y")
    zs = spec.axis_centers("z")
    occ = grid.occupancy
    for iz in range(len(zs)):
        for iy in range(len(ys)):
            for ix in range(len(xs)):
                want = is_reachable(g0, Pose(xs[ix], ys[iy], zs[iz]))
                assert bool(occ[iz, iy, ix]) == want
