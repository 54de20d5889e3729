"""Scale-invariant quantities of a discrete field.

The Hölder seminorm is the sup over node pairs of
(d/2)^alpha |v(x1) - v(x2)| / |x1 - x2|^alpha; taken over mesh nodes it
is a lower estimate of the continuum seminorm (never an overestimate),
which is why downstream inequality checks carry a discretization
tolerance.  The L^p norms integrate the piecewise-linear field exactly
against the normalized measure dx / |mesh|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import OscboundError
from .quadrature import triangle_rule
from .solver import SolutionSample

EXHAUSTIVE_NODE_LIMIT = 4000
DEFAULT_PAIR_BUDGET = 4_000_000


@dataclass(frozen=True)
class NormReport:
    """The four quantities of one field at one (alpha, p)."""

    sample_id: str
    alpha: float
    p: float
    seminorm: float
    lp_centered: float
    mean: float
    boundary_osc: float

    CSV_HEADER = "sample_id,alpha,p,seminorm,lp_centered,mean,boundary_osc"

    def csv_row(self) -> str:
        return (f"{self.sample_id},{self.alpha:.15g},{self.p:.15g},{self.seminorm:.15g},"
                f"{self.lp_centered:.15g},{self.mean:.15g},{self.boundary_osc:.15g}")


def holder_seminorm(sample: SolutionSample, alpha: float,
                    exhaustive_nodes: int = EXHAUSTIVE_NODE_LIMIT,
                    pair_budget: int = DEFAULT_PAIR_BUDGET) -> float:
    """Nodal Hölder seminorm (a lower estimate of the continuum value).

    Exhaustive over all pairs when the node count is at most
    `exhaustive_nodes`; otherwise a deterministic subset: every mesh
    edge, all boundary-boundary pairs, every node against the value
    extrema, plus an arithmetic stride through the remaining pairs up
    to `pair_budget`.
    """
    if not (0 < alpha <= 1):
        raise OscboundError(f"alpha must lie in (0, 1], got {alpha}")
    mesh = sample.mesh
    n = mesh.n_nodes
    if n < 2:
        raise OscboundError("seminorm needs at least two nodes")
    x = np.ascontiguousarray(mesh.nodes[:, 0])
    y = np.ascontiguousarray(mesh.nodes[:, 1])
    v = np.ascontiguousarray(sample.values, dtype=float)
    scale = (mesh.domain_diameter / 2.0) ** alpha
    if n <= exhaustive_nodes:
        return scale * kernels.pair_quotient_max(x, y, v, alpha)
    best = 0.0
    # mesh edges capture the local difference quotients
    e = mesh.edges()
    best = max(best, kernels.pair_quotient_max_indexed(
        x, y, v, np.ascontiguousarray(e[:, 0]), np.ascontiguousarray(e[:, 1]), alpha))
    # all boundary pairs
    bidx = np.flatnonzero(mesh.boundary)
    if len(bidx) >= 2:
        xb = np.ascontiguousarray(x[bidx])
        yb = np.ascontiguousarray(y[bidx])
        vb = np.ascontiguousarray(v[bidx])
        best = max(best, kernels.pair_quotient_max(xb, yb, vb, alpha))
    # every node against the global extrema
    for j in (int(np.argmin(v)), int(np.argmax(v))):
        jj = np.full(n, j, dtype=np.int64)
        ii = np.arange(n, dtype=np.int64)
        keep = ii != jj
        best = max(best, kernels.pair_quotient_max_indexed(
            x, y, v, np.ascontiguousarray(ii[keep]), np.ascontiguousarray(jj[keep]), alpha))
    # deterministic arithmetic stride over the full pair space
    total = n * (n - 1) // 2
    budget = max(0, pair_budget)
    if budget > 0 and total > 0:
        step = max(1, total // budget)
        k = np.arange(0, total, step, dtype=np.float64)
        # invert the triangular pair index: i is the largest with i*n - i(i+1)/2 <= k
        nn = float(n)
        i = np.floor(((2 * nn - 1) - np.sqrt((2 * nn - 1) ** 2 - 8 * k)) / 2.0)
        base = i * nn - i * (i + 1) / 2.0
        j = (k - base) + i + 1
        ii = np.clip(i.astype(np.int64), 0, n - 2)
        jj = np.clip(j.astype(np.int64), 1, n - 1)
        ok = jj > ii
        best = max(best, kernels.pair_quotient_max_indexed(
            x, y, v, np.ascontiguousarray(ii[ok]), np.ascontiguousarray(jj[ok]), alpha))
    return scale * best


def mean_value(sample: SolutionSample) -> float:
    """Area-weighted mean of the PWL field (exact)."""
    mesh = sample.mesh
    tv = sample.values[mesh.triangles]
    return float((mesh.areas() * tv.mean(axis=1)).sum() / mesh.area())


def normalized_lp_norm(sample: SolutionSample, p: float, centered: bool = True) -> float:
    """((1/|mesh|) Int |v - c|^p dx)^(1/p), c = mean when centered.

    Quadrature of degree >= 2p per triangle; exact whenever |v - c|^p is
    a polynomial on each triangle (even integer p or single-signed fields).
    """
    if not (1 <= p < math.inf):
        raise OscboundError(f"p must lie in [1, inf), got {p}")
    mesh = sample.mesh
    c = mean_value(sample) if centered else 0.0
    bary, w = triangle_rule(int(math.ceil(2 * p)))
    vq = np.einsum("qi,mi->mq", bary, sample.values[mesh.triangles]) - c
    integ = (np.abs(vq) ** p * w[None, :]).sum(axis=1) * mesh.areas()
    return float((integ.sum() / mesh.area()) ** (1.0 / p))


def boundary_oscillation(sample: SolutionSample) -> float:
    """max - min of the nodal values over boundary nodes."""
    mesh = sample.mesh
    if int(mesh.boundary.sum()) < 3:
        raise OscboundError("mesh has fewer than 3 boundary nodes")
    vb = sample.values[mesh.boundary]
    return float(vb.max() - vb.min())


def compute_norm_report(sample: SolutionSample, alpha: float, p: float,
                        sample_id: str = "sample",
                        exhaustive_nodes: int = EXHAUSTIVE_NODE_LIMIT,
                        pair_budget: int = DEFAULT_PAIR_BUDGET,
                        seminorm: float | None = None) -> NormReport:
    sem = seminorm if seminorm is not None else holder_seminorm(
        sample, alpha, exhaustive_nodes, pair_budget)
    return NormReport(
        sample_id=sample_id,
        alpha=alpha,
        p=p,
        seminorm=sem,
        lp_centered=normalized_lp_norm(sample, p, centered=True),
        mean=mean_value(sample),
        boundary_osc=boundary_oscillation(sample),
    )
