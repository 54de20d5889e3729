import math

import numpy as np
import pytest

from conftest import trig_boundary_values
from oscbound.errors import OscboundError
from oscbound.meshing import Mesh
from oscbound.norms import (boundary_oscillation, compute_norm_report, holder_seminorm,
                            mean_value, normalized_lp_norm)
from oscbound.solver import Provenance, SolutionSample, assemble_and_solve_dirichlet, reference_solution


def _sample(mesh, values, alpha=1.0):
    return SolutionSample(mesh, np.asarray(values, dtype=float), Provenance("reference", "test"), alpha)


def test_seminorm_constant_is_zero(disk_mesh_05):
    s = _sample(disk_mesh_05, np.full(disk_mesh_05.n_nodes, 7.0))
    assert holder_seminorm(s, 1.0) == 0.0


def test_seminorm_linear_alpha_one(disk_mesh_02):
    s = reference_solution("linear 1 0 0", disk_mesh_02)
    assert holder_seminorm(s, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_seminorm_linear_alpha_half_antipodal(disk_mesh_02):
    # oracle: maximize |cos t1 - cos t2| / |x(t1) - x(t2)|^0.5 over a dense grid
    t = np.linspace(0, 2 * math.pi, 721, endpoint=False)
    x = np.stack([np.cos(t), np.sin(t)], axis=1)
    v = x[:, 0]
    dv = np.abs(v[:, None] - v[None, :])
    dx = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
    np.fill_diagonal(dx, 1.0)
    np.fill_diagonal(dv, 0.0)
    oracle = float((dv / dx**0.5).max())
    assert oracle == pytest.approx(math.sqrt(2.0), rel=1e-4)  # grid-limited oracle
    s = reference_solution("linear 1 0 0", disk_mesh_02)
    assert holder_seminorm(s, 0.5) == pytest.approx(math.sqrt(2.0), rel=1e-9)


def test_lp_norms_closed_forms(disk_mesh_02):
    s = reference_solution("linear 1 0 0", disk_mesh_02)
    # oracle values: (1/pi) Int r^2 cos^2 = 1/4; (1/pi) Int r |r cos| = 4/(3 pi)
    assert normalized_lp_norm(s, 2, centered=False) == pytest.approx(0.5, rel=1e-3)
    assert normalized_lp_norm(s, 1, centered=False) == pytest.approx(4 / (3 * math.pi), rel=1e-3)
    const = _sample(disk_mesh_02, np.full(disk_mesh_02.n_nodes, 3.0))
    assert normalized_lp_norm(const, 1.7, centered=False) == pytest.approx(3.0, rel=1e-12)
    assert normalized_lp_norm(const, 1.7, centered=True) == pytest.approx(0.0, abs=1e-12)


def test_mean_values(disk_mesh_02):
    assert mean_value(reference_solution("linear 1 0 0", disk_mesh_02)) == pytest.approx(0.0, abs=1e-12)
    assert mean_value(reference_solution("squared 0 0", disk_mesh_02)) == pytest.approx(0.5, rel=2e-3)
    const = _sample(disk_mesh_02, np.full(disk_mesh_02.n_nodes, 3.0))
    assert mean_value(const) == pytest.approx(3.0, rel=1e-14)


def test_boundary_oscillation(disk_mesh_02):
    assert boundary_oscillation(reference_solution("linear 1 0 0", disk_mesh_02)) == pytest.approx(2.0, abs=1e-12)
    assert boundary_oscillation(reference_solution("harmonic 2 re", disk_mesh_02)) == pytest.approx(2.0, rel=1e-6)
    const = _sample(disk_mesh_02, np.full(disk_mesh_02.n_nodes, 3.0))
    assert boundary_oscillation(const) == 0.0


def test_shift_invariance_exact(disk_mesh_05):
    rng = np.random.default_rng(2)
    coeffs = rng.normal(size=9)
    s = assemble_and_solve_dirichlet(disk_mesh_05, __import__("oscbound").identity_field(),
                                     trig_boundary_values(coeffs, disk_mesh_05.nodes[disk_mesh_05.boundary]))
    shifted = s.shifted(17.25)
    assert holder_seminorm(shifted, 1.0) == pytest.approx(holder_seminorm(s, 1.0), rel=1e-12)
    assert boundary_oscillation(shifted) == pytest.approx(boundary_oscillation(s), rel=1e-12)
    assert normalized_lp_norm(shifted, 2) == pytest.approx(normalized_lp_norm(s, 2), rel=1e-12)


def test_dilation_invariance(disk_mesh_05):
    s = reference_solution("harmonic 3 im", disk_mesh_05)
    t = 10.0
    big = s.dilated(t)
    for alpha in (1.0, 0.5):
        assert holder_seminorm(big, alpha) == pytest.approx(holder_seminorm(s, alpha), rel=1e-12)
    for p in (1.0, 2.0, 4.0):
        assert normalized_lp_norm(big, p) == pytest.approx(normalized_lp_norm(s, p), rel=1e-12)
    assert boundary_oscillation(big) == boundary_oscillation(s)


def test_osc_bounded_by_seminorm(disk_mesh_05):
    # osc <= 2^alpha [v]_alpha, from the seminorm definition with |x1-x2| <= d
    rng = np.random.default_rng(5)
    for trial in range(5):
        coeffs = rng.normal(size=11)
        s = _sample(disk_mesh_05, trig_boundary_values(
            coeffs, disk_mesh_05.nodes) * (1 + disk_mesh_05.nodes[:, 0] ** 2))
        for alpha in (0.3, 0.7, 1.0):
            assert boundary_oscillation(s) <= 2**alpha * holder_seminorm(s, alpha) * (1 + 1e-12)


def test_budget_never_exceeds_exhaustive(disk_mesh_05):
    s = reference_solution("fourier 0 0.3 1 0.5 0.2 0.1 0.4", disk_mesh_05)
    exhaustive = holder_seminorm(s, 1.0, exhaustive_nodes=10**9)
    budget = holder_seminorm(s, 1.0, exhaustive_nodes=0, pair_budget=50_000)
    assert budget <= exhaustive * (1 + 1e-15)


def test_seminorm_argument_checks(disk_mesh_05):
    s = reference_solution("linear 1 0 0", disk_mesh_05)
    with pytest.raises(OscboundError):
        holder_seminorm(s, 0.0)
    with pytest.raises(OscboundError):
        holder_seminorm(s, 1.5)
    with pytest.raises(OscboundError):
        normalized_lp_norm(s, 0.5)
    tiny = Mesh(np.array([[0.0, 0.0]]), np.zeros((0, 3), dtype=int), np.array([True]),
                0.1, domain_diameter=1.0, domain_area=1.0)
    with pytest.raises(OscboundError):
        holder_seminorm(_sample(tiny, [1.0]), 1.0)


def test_norm_report_csv(disk_mesh_05):
    rep = compute_norm_report(reference_solution("linear 1 0 0", disk_mesh_05), 1.0, 2.0, "id7")
    row = rep.csv_row()
    assert row.startswith("id7,1,2,")
    assert len(row.split(",")) == len(rep.CSV_HEADER.split(","))
