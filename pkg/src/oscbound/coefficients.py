"""Coefficient matrices A(x) with certified ellipticity bounds.

Fields are symmetric 2x2 matrix maps with eigenvalues confined to
[lambda_min, lambda_max].  Rough fields are piecewise constant per cell,
drawn deterministically from the seed so identical requests rebuild
bitwise-identical fields.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FieldError


@dataclass(frozen=True)
class CoefficientField:
    """Measurable map point -> symmetric positive-definite 2x2 matrix."""

    kind: str
    lambda_min: float
    lambda_max: float
    evaluator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    spec: str = ""

    @property
    def is_constant(self) -> bool:
        return self.kind in ("identity", "constant")

    def at(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at an (n, 2) array of points; returns (n, 2, 2)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = self.evaluator(p)
        return out

    def constant_matrix(self) -> np.ndarray:
        if not self.is_constant:
            raise FieldError(f"field kind {self.kind!r} is not constant")
        return self.at(np.zeros((1, 2)))[0]


def identity_field() -> CoefficientField:
    def ev(p):
        return np.broadcast_to(np.eye(2), (len(p), 2, 2)).copy()

    return CoefficientField("identity", 1.0, 1.0, ev, spec="identity")


def constant_field(matrix) -> CoefficientField:
    A = np.asarray(matrix, dtype=float)
    _require_spd(A)
    w = np.linalg.eigvalsh(A)

    def ev(p):
        return np.broadcast_to(A, (len(p), 2, 2)).copy()

    spec = "constant " + " ".join(f"{v:.17g}" for v in A.ravel())
    return CoefficientField("constant", float(w[0]), float(w[1]), ev, spec=spec)


def checkerboard_field(cell: float, matrix_even, matrix_odd) -> CoefficientField:
    if cell <= 0:
        raise FieldError(f"cell size must be positive, got {cell}")
    A0 = np.asarray(matrix_even, dtype=float)
    A1 = np.asarray(matrix_odd, dtype=float)
    _require_spd(A0)
    _require_spd(A1)
    w = np.concatenate([np.linalg.eigvalsh(A0), np.linalg.eigvalsh(A1)])

    def ev(p):
        ij = np.floor(p / cell).astype(np.int64)
        parity = (ij[:, 0] + ij[:, 1]) % 2
        out = np.where(parity[:, None, None] == 0, A0[None], A1[None])
        return out

    spec = (f"checkerboard {cell:.17g} " + " ".join(f"{v:.17g}" for v in A0.ravel())
            + " " + " ".join(f"{v:.17g}" for v in A1.ravel()))
    return CoefficientField("checkerboard", float(w.min()), float(w.max()), ev, spec=spec)


def random_cell_field(cell: float, eig_lo: float, eig_hi: float, seed: int) -> CoefficientField:
    """Piecewise-constant random SPD field, log-uniform eigenvalues per cell.

    Each cell draws from a generator keyed by (seed, i, j), so evaluation
    order never changes the field.
    """
    if cell <= 0:
        raise FieldError(f"cell size must be positive, got {cell}")
    if not (0 < eig_lo <= eig_hi):
        raise FieldError(f"eigenvalue range must satisfy 0 < lo <= hi, got [{eig_lo}, {eig_hi}]")
    log_lo, log_hi = math.log(eig_lo), math.log(eig_hi)

    def cell_matrix(i: int, j: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1_000_003 + i, 2_000_003 + j])))
        e1, e2 = np.exp(rng.uniform(log_lo, log_hi, size=2))
        phi = rng.uniform(0.0, math.pi)
        c, s = math.cos(phi), math.sin(phi)
        R = np.array([[c, -s], [s, c]])
        return R @ np.diag([e1, e2]) @ R.T

    cache: dict[tuple[int, int], np.ndarray] = {}

    def ev(p):
        ij = np.floor(p / cell).astype(np.int64)
        out = np.empty((len(p), 2, 2))
        for k, (i, j) in enumerate(map(tuple, ij)):
            key = (int(i), int(j))
            if key not in cache:
                cache[key] = cell_matrix(*key)
            out[k] = cache[key]
        return out

    spec = f"random {cell:.17g} {eig_lo:.17g} {eig_hi:.17g} seed={seed}"
    return CoefficientField("random", eig_lo, eig_hi, ev, spec=spec)


def make_field(kind: str, *, seed: int = 0, matrix=None, cell: float = 0.25,
               matrix_even=None, matrix_odd=None, eig_lo: float = 1.0,
               eig_hi: float = 1.0) -> CoefficientField:
    """Build a field from a kind keyword plus numeric parameters."""
    if kind == "identity":
        return identity_field()
    if kind == "constant":
        return constant_field(matrix if matrix is not None else np.eye(2))
    if kind == "checkerboard":
        a = matrix_even if matrix_even is not None else np.eye(2)
        b = matrix_odd if matrix_odd is not None else 5.0 * np.eye(2)
        return checkerboard_field(cell, a, b)
    if kind == "random":
        return random_cell_field(cell, eig_lo, eig_hi, seed)
    raise FieldError(f"unknown field kind {kind!r}")


def _require_spd(A):
    if A.shape != (2, 2):
        raise FieldError(f"expected a 2x2 matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0, atol=1e-14 * max(1.0, np.abs(A).max())):
        raise FieldError("matrix must be symmetric")
    w = np.linalg.eigvalsh(A)
    if w[0] <= 0:
        raise FieldError(f"matrix must be positive definite, eigenvalues {w}")


@dataclass(frozen=True)
class EllipticityReport:
    passed: bool
    min_quotient: float
    max_quotient: float
    lambda_min: float
    lambda_max: float

    @property
    def worst_margin(self) -> float:
        return max(self.lambda_min - self.min_quotient, self.max_quotient - self.lambda_max)


def verify_ellipticity(fld: CoefficientField, n_samples: int = 1000, seed: int = 0,
                       box: tuple[float, float, float, float] = (-1.0, -1.0, 1.0, 1.0)) -> EllipticityReport:
    """Sample Rayleigh quotients and compare with the declared bounds.

    Failure is a result, not an error.  Bounds are allowed a 1e-12
    relative fattening for roundoff.
    """
    if n_samples < 1:
        raise FieldError("need at least one sample")
    rng = np.random.Generator(np.random.PCG64(seed))
    x0, y0, x1, y1 = box
    pts = np.column_stack([rng.uniform(x0, x1, n_samples), rng.uniform(y0, y1, n_samples)])
    ang = rng.uniform(0.0, 2.0 * math.pi, n_samples)
    xi = np.column_stack([np.cos(ang), np.sin(ang)])
    A = fld.at(pts)
    if not np.allclose(A, np.transpose(A, (0, 2, 1)), rtol=0, atol=1e-13 * max(1.0, np.abs(A).max())):
        return EllipticityReport(False, math.nan, math.nan, fld.lambda_min, fld.lambda_max)
    quot = np.einsum("ni,nij,nj->n", xi, A, xi)
    qmin, qmax = float(quot.min()), float(quot.max())
    eps = 1e-12
    ok = qmin >= fld.lambda_min * (1 - eps) - eps and qmax <= fld.lambda_max * (1 + eps) + eps
    return EllipticityReport(ok, qmin, qmax, fld.lambda_min, fld.lambda_max)


def matrix_sqrt(A) -> np.ndarray:
    """Symmetric positive-definite square root of a 2x2 SPD matrix."""
    A = np.asarray(A, dtype=float)
    _require_spd(A)
    w, V = np.linalg.eigh(A)
    return (V * np.sqrt(w)) @ V.T
