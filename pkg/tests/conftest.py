import numpy as np
import pytest

from oscbound.geometry import Disk, unit_square
from oscbound.meshing import mesh_domain


@pytest.fixture(scope="session")
def disk():
    return Disk()


@pytest.fixture(scope="session")
def disk_mesh_05(disk):
    return mesh_domain(disk, 0.05)


@pytest.fixture(scope="session")
def disk_mesh_02(disk):
    return mesh_domain(disk, 0.02)


@pytest.fixture(scope="session")
def square_mesh():
    return mesh_domain(unit_square(), 0.1)


def trig_boundary_values(coeffs, points, center=(0.0, 0.0)):
    """a0 + sum a_k cos k phi + b_k sin k phi at the given points."""
    pts = np.atleast_2d(points)
    phi = np.arctan2(pts[:, 1] - center[1], pts[:, 0] - center[0])
    out = np.full(len(pts), float(coeffs[0]))
    k, idx = 1, 1
    while idx < len(coeffs):
        out += coeffs[idx] * np.cos(k * phi)
        if idx + 1 < len(coeffs):
            out += coeffs[idx + 1] * np.sin(k * phi)
        idx += 2
        k += 1
    return out
