"""Gauss quadrature rules on the reference triangle (Duffy construction).

Rules are exact for bivariate polynomials up to the requested total
degree, have positive weights, and normalize so that the weights sum
to one: integral over a physical triangle = area * sum(w_q * f(x_q)).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def triangle_rule(degree: int):
    """(barycentric points (q, 3), weights (q,)) exact to `degree`."""
    degree = max(int(degree), 1)
    n_u = (degree + 3) // 2  # integrand picks up one extra power from the Jacobian
    n_v = (degree + 2) // 2
    xu, wu = np.polynomial.legendre.leggauss(n_u)
    xv, wv = np.polynomial.legendre.leggauss(n_v)
    u = 0.5 * (xu + 1.0)
    v = 0.5 * (xv + 1.0)
    wu = 0.5 * wu
    wv = 0.5 * wv
    U, V = np.meshgrid(u, v, indexing="ij")
    WU, WV = np.meshgrid(wu, wv, indexing="ij")
    x = U.ravel()
    y = (V * (1.0 - U)).ravel()
    w = (WU * WV * (1.0 - U)).ravel()  # Duffy Jacobian
    bary = np.stack([1.0 - x - y, x, y], axis=1)
    return bary, w / w.sum()


def disk_rule(n_radial: int = 64, n_angular: int = 64):
    """Tensor rule on the unit disk: Gauss in radius, uniform in angle.

    Weights sum to one; integral over the unit disk of f equals
    pi * sum(w_q f(x_q)).
    """
    xr, wr = np.polynomial.legendre.leggauss(n_radial)
    r = 0.5 * (xr + 1.0)
    wr = 0.5 * wr * 2.0 * r  # area element r dr, normalized below
    t = np.arange(n_angular) * (2.0 * math.pi / n_angular)
    wt = np.full(n_angular, 1.0 / n_angular)
    R, T = np.meshgrid(r, t, indexing="ij")
    WR, WT = np.meshgrid(wr, wt, indexing="ij")
    pts = np.stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()], axis=1)
    w = (WR * WT).ravel()
    return pts, w / w.sum()
