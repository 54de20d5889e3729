"""Computable mean-value families: balls for the Laplacian, ellipsoids for
constant coefficients.

The family at x0 is D_r = x0 + S B_r with S the SPD square root of the
(constant) coefficient matrix, so the inclusion constants are the extreme
eigenvalues of S: B_{cr} subset D_r subset B_{Cr} with c = sqrt(lambda),
C = sqrt(Lambda).  Subsolution averages over D_r dominate the center
value and grow with r; both checks run on the piecewise-linear
interpolant with the quadrature/interpolation error folded into the
tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coefficients import CoefficientField, matrix_sqrt
from .errors import MeanValueError
from .geometry import Domain
from .meshing import TriLocator
from .quadrature import disk_rule
from .solver import SolutionSample, weak_subsolution_residual

_QUAD_N = 64


@dataclass(frozen=True)
class MeanValueFamily:
    """Increasing family D_r(x0) with inclusion constants c <= C."""

    center: np.ndarray
    shape: str              # ball | ellipsoid
    S: np.ndarray           # maps the unit disk onto D_1 - x0
    c: float
    C: float
    r_max: float

    def boundary_points(self, r: float, n: int = 128) -> np.ndarray:
        t = np.arange(n) * (2.0 * math.pi / n)
        circ = np.stack([np.cos(t), np.sin(t)], axis=1)
        return self.center + (r * circ) @ self.S.T


def build_family(fld: CoefficientField, x0, domain: Domain) -> MeanValueFamily:
    """Ball family for the identity field, ellipsoid family for constant A."""
    x0 = np.asarray(x0, dtype=float)
    dist = float(domain.boundary_distance(x0[None, :])[0])
    if not domain.contains(x0[None, :]).all() or dist <= 0:
        raise MeanValueError(f"center {tuple(x0)} is not strictly inside the domain")
    if fld.kind == "identity":
        return MeanValueFamily(x0, "ball", np.eye(2), 1.0, 1.0, dist)
    if fld.kind == "constant":
        A = fld.constant_matrix()
        S = matrix_sqrt(A)
        w = np.linalg.eigvalsh(S)
        c, C = float(w[0]), float(w[1])
        return MeanValueFamily(x0, "ellipsoid", S, c, C, dist / C)
    raise MeanValueError(
        "family construction out of scope for variable coefficients "
        "(companion-paper obstacle problem)")


def _locator(mesh) -> TriLocator:
    if "locator" not in mesh._cache:
        mesh._cache["locator"] = TriLocator(mesh)
    return mesh._cache["locator"]


def set_average(sample: SolutionSample, family: MeanValueFamily, r: float,
                n_quad: int = _QUAD_N) -> float:
    """Average of the PWL field over D_r(x0) by mapped tensor quadrature.

    The affine pullback to the unit disk cancels det(S), so the average
    is a plain weighted sum of interpolated values.
    """
    if not (0 < r <= family.r_max * (1 + 1e-12)):
        raise MeanValueError(f"radius {r} outside (0, r_max={family.r_max:.6g}]")
    mesh = sample.mesh
    if mesh.domain is not None:
        dist = float(mesh.domain.boundary_distance(family.center[None, :])[0])
        if family.C * r > dist * (1 + 1e-12):
            raise MeanValueError(
                f"outer ball of D_r escapes the domain: C*r={family.C * r:.6g} > dist={dist:.6g}")
    pts, w = disk_rule(n_quad, n_quad)
    phys = family.center + (r * pts) @ family.S.T
    vals = _locator(mesh).interpolate(phys, sample.values)
    return float((w * vals).sum())


def value_at(sample: SolutionSample, x0) -> float:
    return float(_locator(sample.mesh).interpolate(np.atleast_2d(x0), sample.values)[0])


@dataclass(frozen=True)
class MeanValueReport:
    x0: np.ndarray
    radii: tuple
    averages: tuple
    v_at_x0: float
    tol: float
    lower_bound_ok: bool      # v(x0) <= average at the smallest radius
    monotone_ok: bool         # averages nondecreasing along the radii
    inclusion_ok: bool        # sampled D_r boundary inside the c/C annulus
    subsolution_verified: bool
    note: str = ""

    CSV_HEADER = "x0x,x0y,r,average,v_at_x0,monotone_ok,inclusion_ok"

    def csv_rows(self):
        rows = []
        for r, a in zip(self.radii, self.averages):
            rows.append(f"{self.x0[0]:.15g},{self.x0[1]:.15g},{r:.15g},{a:.15g},"
                        f"{self.v_at_x0:.15g},{int(self.monotone_ok)},{int(self.inclusion_ok)}")
        return rows

    @property
    def ok(self):
        return self.lower_bound_ok and self.monotone_ok and self.inclusion_ok


def interpolation_error_bound(sample: SolutionSample) -> float:
    """Heuristic PWL interpolation + quadrature error scale, documented as
    2 h^2 osc(v) / (d/2)^2; folded into the mean-value tolerance."""
    v = sample.values
    osc = float(v.max() - v.min())
    half_d = sample.mesh.domain_diameter / 2.0
    return 2.0 * sample.mesh.h**2 * osc / (half_d * half_d)


def check_mean_value_property(sample: SolutionSample, fld: CoefficientField, x0,
                              radii, n_quad: int = _QUAD_N,
                              verify_residual: bool = True) -> MeanValueReport:
    """Check v(x0) <= averages, monotonicity in r, and the inclusion sandwich."""
    radii = tuple(float(r) for r in radii)
    if any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])):
        raise MeanValueError("radii must be strictly increasing")
    family = build_family(fld, x0, sample.mesh.domain) if sample.mesh.domain is not None \
        else build_family(fld, x0, _mesh_hull_domain(sample.mesh))
    v0 = value_at(sample, x0)
    tol = 1e-6 * (1.0 + abs(v0)) + interpolation_error_bound(sample)
    averages = tuple(set_average(sample, family, r, n_quad) for r in radii)
    lower_ok = v0 <= averages[0] + tol
    monotone_ok = all(a2 >= a1 - tol for a1, a2 in zip(averages, averages[1:]))
    inclusion_ok = True
    for r in radii:
        bp = family.boundary_points(r)
        dd = np.hypot(bp[:, 0] - family.center[0], bp[:, 1] - family.center[1])
        if dd.min() < family.c * r * (1 - 1e-12) or dd.max() > family.C * r * (1 + 1e-12):
            inclusion_ok = False
    sub_ok = True
    note = ""
    if verify_residual:
        rep = weak_subsolution_residual(sample, fld)
        sub_ok = rep.is_subsolution
        if not sub_ok and not (lower_ok and monotone_ok):
            note = "not a subsolution: consistency violation expected"
    return MeanValueReport(np.asarray(x0, dtype=float), radii, averages, v0, tol,
                           lower_ok, monotone_ok, inclusion_ok, sub_ok, note)


def _mesh_hull_domain(mesh):
    raise MeanValueError("mean-value checks need a mesh built from a domain")
