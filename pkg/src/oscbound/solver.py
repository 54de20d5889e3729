"""P1 Galerkin solver for div(A(x) grad v) = 0 with Dirichlet data.

One coefficient matrix per element (centroid evaluation), Jacobi
preconditioned conjugate gradients, and closed-form reference fields.
A discrete solve must land between the boundary extremes (maximum
principle) and is rejected otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .coefficients import CoefficientField
from .errors import SolverError
from .geometry import Disk
from .meshing import Mesh

SOLVE_RTOL = 1e-10
MAXPRINCIPLE_REL = 1e-8


@dataclass(frozen=True)
class Provenance:
    kind: str  # dirichlet-solve | subsolution | reference
    detail: str = ""


@dataclass
class SolutionSample:
    """Discrete scalar field on a mesh with provenance."""

    mesh: Mesh
    values: np.ndarray
    provenance: Provenance
    alpha: float = 1.0

    def shifted(self, c: float) -> "SolutionSample":
        return SolutionSample(self.mesh, self.values + c, self.provenance, self.alpha)

    def dilated(self, t: float) -> "SolutionSample":
        """Push the field through x -> t x (values ride along)."""
        m = self.mesh
        scaled = Mesh(m.nodes * t, m.triangles, m.boundary, m.h * t,
                      domain=None, domain_diameter=m.domain_diameter * t,
                      domain_area=m.domain_area * t * t)
        return SolutionSample(scaled, self.values.copy(), self.provenance, self.alpha)


def assemble_stiffness(mesh: Mesh, field: CoefficientField) -> sp.csr_matrix:
    """Global stiffness matrix; exactly symmetric by construction."""
    g = mesh.hat_gradients()          # (m, 3, 2)
    A = field.at(mesh.centroids())    # (m, 2, 2)
    areas = mesh.areas()
    Ag = np.einsum("mab,mjb->mja", A, g)
    K_loc = np.einsum("mia,mja->mij", g, Ag) * areas[:, None, None]
    K_loc = 0.5 * (K_loc + np.transpose(K_loc, (0, 2, 1)))
    t = mesh.triangles
    rows = np.repeat(t, 3).reshape(-1)
    cols = np.tile(t, (1, 3)).reshape(-1)
    K = sp.coo_matrix((K_loc.reshape(-1), (rows, cols)),
                      shape=(mesh.n_nodes, mesh.n_nodes)).tocsr()
    return K


def _boundary_values(mesh, g):
    bidx = np.flatnonzero(mesh.boundary)
    pts = mesh.nodes[bidx]
    if callable(g):
        vals = np.asarray([g(p) for p in pts], dtype=float)
    else:
        vals = np.asarray(g, dtype=float)
        if vals.shape == (mesh.n_nodes,):
            vals = vals[bidx]
    if vals.shape != (len(bidx),):
        raise SolverError(f"boundary data shape {vals.shape} does not match {len(bidx)} boundary nodes")
    if not np.isfinite(vals).all():
        raise SolverError("boundary data not finite at some boundary node")
    return bidx, vals


def assemble_and_solve_dirichlet(mesh: Mesh, field: CoefficientField, g,
                                 rtol: float = SOLVE_RTOL,
                                 stiffness: sp.csr_matrix | None = None) -> SolutionSample:
    """Solve the Dirichlet problem; g is a callable on points or a value array.

    Pass a preassembled stiffness matrix to amortize it across many
    right-hand sides on the same mesh and field.
    """
    K = stiffness if stiffness is not None else assemble_stiffness(mesh, field)
    bidx, gb = _boundary_values(mesh, g)
    iidx = np.flatnonzero(~mesh.boundary)
    v = np.zeros(mesh.n_nodes)
    v[bidx] = gb
    if len(iidx) > 0:
        Kii = K[iidx][:, iidx].tocsr()
        rhs = -(K[iidx][:, bidx] @ gb)
        diag = Kii.diagonal()
        if np.any(diag <= 0):
            raise SolverError("stiffness diagonal not positive; mesh or field invalid")
        maxiter = int(50 * math.sqrt(len(iidx)) + 1000)
        x, _, hist = kernels.pcg_solve(
            Kii.indptr.astype(np.int64), Kii.indices.astype(np.int64),
            Kii.data.astype(np.float64), rhs.astype(np.float64),
            (1.0 / diag).astype(np.float64), np.zeros(len(iidx)), rtol, maxiter)
        if hist[-1] > rtol:
            raise SolverError(
                f"conjugate gradients stalled at relative residual {hist[-1]:.3e}",
                residual_history=hist)
        v[iidx] = x
    osc = float(gb.max() - gb.min())
    eps = MAXPRINCIPLE_REL * osc + 1e-14 * max(1.0, np.abs(gb).max())
    if v.min() < gb.min() - eps or v.max() > gb.max() + eps:
        raise SolverError(
            f"discrete maximum principle violated: range [{v.min():.6g}, {v.max():.6g}] "
            f"vs boundary [{gb.min():.6g}, {gb.max():.6g}]")
    return SolutionSample(mesh, v, Provenance("dirichlet-solve", getattr(g, "__name__", "data")))


@dataclass(frozen=True)
class ResidualReport:
    residuals: np.ndarray      # -(K v)_i at interior nodes
    interior_index: np.ndarray
    scale: float
    is_subsolution: bool
    is_solution: bool


def weak_subsolution_residual(sample: SolutionSample, field: CoefficientField,
                              tol_rel: float = 1e-9) -> ResidualReport:
    """Negated stiffness action on interior nodes; >= 0 marks a subsolution."""
    mesh = sample.mesh
    K = assemble_stiffness(mesh, field)
    Kv = K @ sample.values
    iidx = np.flatnonzero(~mesh.boundary)
    res = -Kv[iidx]
    absK = sp.csr_matrix((np.abs(K.data), K.indices, K.indptr), shape=K.shape)
    scale = float((absK @ np.abs(sample.values))[iidx].max()) if len(iidx) else 1.0
    scale = max(scale, 1e-300)
    is_sub = bool((res >= -tol_rel * scale).all())
    is_sol = bool((np.abs(res) <= tol_rel * scale).all())
    return ResidualReport(res, iidx, scale, is_sub, is_sol)


# ---------------------------------------------------------------------------
# closed-form reference fields


def evaluate_reference(ref_id: str, points: np.ndarray, domain=None) -> tuple[np.ndarray, str]:
    """Evaluate a closed-form field at points; returns (values, provenance kind).

    Ids: `linear a b c`, `harmonic k re|im`, `squared x0 y0`,
    `fourier a0 a1 b1 [a2 b2 ...]` (disk domains only; the angular modes
    are harmonic in the disk after radial scaling).
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    parts = ref_id.split()
    kind = parts[0] if parts else ""
    if kind == "linear":
        a, b, c = (float(t) for t in parts[1:4])
        return a * p[:, 0] + b * p[:, 1] + c, "reference"
    if kind == "harmonic":
        k = int(parts[1])
        if not (1 <= k <= 6):
            raise SolverError(f"harmonic polynomial degree must be 1..6, got {k}")
        comp = parts[2] if len(parts) > 2 else "re"
        z = (p[:, 0] + 1j * p[:, 1]) ** k
        return (z.real if comp == "re" else z.imag), "reference"
    if kind == "squared":
        x0, y0 = (float(t) for t in parts[1:3]) if len(parts) >= 3 else (0.0, 0.0)
        return (p[:, 0] - x0) ** 2 + (p[:, 1] - y0) ** 2, "subsolution"
    if kind == "fourier":
        if not isinstance(domain, Disk):
            raise SolverError("fourier reference data needs a disk domain")
        coeffs = [float(t) for t in parts[1:]]
        return fourier_harmonic(coeffs, domain, p), "reference"
    raise SolverError(f"unknown reference id {ref_id!r}")


def fourier_harmonic(coeffs, disk: Disk, points) -> np.ndarray:
    """a0 + sum_k rho^k (a_k cos k phi + b_k sin k phi), rho = |x-c|/R.

    Harmonic in the disk; on the circle it reduces to the trigonometric
    polynomial with the given coefficients.
    """
    p = np.atleast_2d(np.asarray(points, dtype=float))
    q = (p - disk.center) / disk.radius
    rho = np.hypot(q[:, 0], q[:, 1])
    phi = np.arctan2(q[:, 1], q[:, 0])
    out = np.full(len(p), coeffs[0] if coeffs else 0.0)
    k = 1
    idx = 1
    while idx < len(coeffs):
        a_k = coeffs[idx]
        b_k = coeffs[idx + 1] if idx + 1 < len(coeffs) else 0.0
        out += rho**k * (a_k * np.cos(k * phi) + b_k * np.sin(k * phi))
        idx += 2
        k += 1
    return out


def reference_solution(ref_id: str, mesh: Mesh, alpha: float = 1.0) -> SolutionSample:
    """Nodal evaluation of a closed form with provenance set accordingly."""
    vals, kind = evaluate_reference(ref_id, mesh.nodes, domain=mesh.domain)
    return SolutionSample(mesh, vals, Provenance(kind, ref_id), alpha)


def l2_error(sample: SolutionSample, exact_fn, degree: int = 6) -> float:
    """L2 distance between the PWL field and a callable, by triangle quadrature."""
    from .quadrature import triangle_rule

    mesh = sample.mesh
    bary, w = triangle_rule(degree)
    c = mesh.corners()                       # (m, 3, 2)
    pts = np.einsum("qi,mid->mqd", bary, c)  # (m, q, 2)
    vh = np.einsum("qi,mi->mq", bary, sample.values[mesh.triangles])
    ve = exact_fn(pts.reshape(-1, 2)).reshape(vh.shape)
    err2 = ((vh - ve) ** 2 * w[None, :]).sum(axis=1) * mesh.areas()
    return math.sqrt(float(err2.sum()))
