import numpy as np
import pytest

from oscbound.errors import MeshError
from oscbound.geometry import Disk, Ellipse, Polygon, unit_square
from oscbound.meshing import Mesh, TriLocator, mesh_domain, read_mesh, write_mesh


def test_disk_boundary_nodes_on_circle(disk_mesh_05):
    m = disk_mesh_05
    b = m.nodes[m.boundary]
    assert np.abs(np.hypot(b[:, 0], b[:, 1]) - 1.0).max() <= 1e-10 * 2.0


def test_square_coarse_area_exact():
    m = mesh_domain(unit_square(), 0.5)
    assert m.area() == 1.0


def test_refinement_roughly_quadruples_triangles():
    m1 = mesh_domain(Disk(), 0.1)
    m2 = mesh_domain(Disk(), 0.05)
    ratio = m2.n_triangles / m1.n_triangles
    assert 3.0 <= ratio <= 5.0


@pytest.mark.parametrize("dom,h", [
    (Disk(), 0.1), (unit_square(), 0.15),
    (Ellipse((0, 0), 2, 1), 0.1),
    (Polygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]), 0.12),  # L-shape
])
def test_mesh_invariants(dom, h):
    m = mesh_domain(dom, h)
    assert m.min_angle_deg() >= 15.0
    # positive orientation
    c = m.corners()
    s = ((c[:, 1, 0] - c[:, 0, 0]) * (c[:, 2, 1] - c[:, 0, 1])
         - (c[:, 1, 1] - c[:, 0, 1]) * (c[:, 2, 0] - c[:, 0, 0]))
    assert (s > 0).all()
    assert dom.boundary_distance(m.nodes[m.boundary]).max() <= 1e-10 * dom.diameter
    if isinstance(dom, Polygon):
        assert abs(m.area() - dom.area) <= 1e-9 * dom.area
    else:
        assert abs(m.area() - dom.area) <= 0.05 * dom.area * (h / dom.diameter) ** 0.0  # O(h^2) below
        assert abs(m.area() - dom.area) / dom.area <= 2.0 * h * h


def test_h_out_of_range():
    with pytest.raises(MeshError):
        mesh_domain(Disk(), 1.2)
    with pytest.raises(MeshError):
        mesh_domain(Disk(), 0.0)


def test_mesh_deterministic():
    a = mesh_domain(Disk(), 0.08)
    b = mesh_domain(Disk(), 0.08)
    assert np.array_equal(a.nodes, b.nodes)
    assert np.array_equal(a.triangles, b.triangles)
    assert np.array_equal(a.boundary, b.boundary)


def test_dump_roundtrip(tmp_path, disk_mesh_05):
    m = disk_mesh_05
    vals = m.nodes[:, 0] ** 2
    path = tmp_path / "mesh.txt"
    write_mesh(m, path, vals)
    m2, vals2 = read_mesh(path, h=m.h)
    assert np.array_equal(m.triangles, m2.triangles)
    assert np.allclose(m.nodes, m2.nodes, atol=0, rtol=0)
    assert np.array_equal(m.boundary, m2.boundary)
    assert np.allclose(vals, vals2, atol=0, rtol=0)
    assert m2.domain_diameter == pytest.approx(m.domain_diameter, rel=1e-12)


def test_dump_without_values(tmp_path, square_mesh):
    path = tmp_path / "m.txt"
    write_mesh(square_mesh, path)
    m2, vals = read_mesh(path)
    assert vals is None
    assert m2.n_triangles == square_mesh.n_triangles


def test_locator_interpolates_linear_exactly(disk_mesh_05):
    m = disk_mesh_05
    loc = TriLocator(m)
    rng = np.random.default_rng(0)
    pts = rng.uniform(-0.6, 0.6, size=(500, 2))
    vals = 3.0 * m.nodes[:, 0] - 2.0 * m.nodes[:, 1] + 1.0
    out = loc.interpolate(pts, vals)
    expect = 3.0 * pts[:, 0] - 2.0 * pts[:, 1] + 1.0
    assert np.abs(out - expect).max() <= 1e-12


def test_locator_outside_points_fall_back_to_nearest(disk_mesh_05):
    m = disk_mesh_05
    loc = TriLocator(m)
    out = loc.interpolate(np.array([[2.0, 0.0]]), m.nodes[:, 0])
    assert out[0] == pytest.approx(1.0, abs=1e-6)  # nearest node sits at (1, 0)
