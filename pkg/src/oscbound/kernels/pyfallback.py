"""Numpy implementations of the hot kernels (no compiled extension needed)."""

import numpy as np
import scipy.sparse as sp

_CHUNK = 2048


def _block_max(dx, dy, dv, alpha):
    r2 = dx * dx + dy * dy
    np.abs(dv, out=dv)
    with np.errstate(divide="ignore", invalid="ignore"):
        if alpha == 1.0:
            q = dv / np.sqrt(r2)
        else:
            q = dv / r2 ** (0.5 * alpha)
    q[r2 == 0] = 0.0
    return float(q.max()) if q.size else 0.0


def pair_quotient_max(x, y, v, alpha):
    """Max over unordered pairs of |v_i - v_j| / dist(i, j)^alpha."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    v = np.ascontiguousarray(v, dtype=float)
    n = len(x)
    best = 0.0
    for bi in range(0, n, _CHUNK):
        i1 = min(bi + _CHUNK, n)
        for bj in range(bi, n, _CHUNK):
            j1 = min(bj + _CHUNK, n)
            dx = x[bi:i1, None] - x[None, bj:j1]
            dy = y[bi:i1, None] - y[None, bj:j1]
            dv = v[bi:i1, None] - v[None, bj:j1]
            if bi == bj:
                iu = np.tril_indices(i1 - bi, k=0, m=j1 - bj)
                dv[iu] = 0.0
            best = max(best, _block_max(dx, dy, dv, alpha))
    return best


def pair_quotient_max_cross(x1, y1, v1, x2, y2, v2, alpha):
    """Max quotient over pairs taking one point from each set."""
    x1 = np.asarray(x1, dtype=float)
    best = 0.0
    for bi in range(0, len(x1), _CHUNK):
        i1 = min(bi + _CHUNK, len(x1))
        dx = np.asarray(x1)[bi:i1, None] - np.asarray(x2)[None, :]
        dy = np.asarray(y1)[bi:i1, None] - np.asarray(y2)[None, :]
        dv = np.asarray(v1)[bi:i1, None] - np.asarray(v2)[None, :]
        best = max(best, _block_max(dx, dy, dv.astype(float), alpha))
    return best


def pair_quotient_max_indexed(x, y, v, ii, jj, alpha):
    """Max quotient over the explicit index pairs (ii[k], jj[k])."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = np.asarray(v, dtype=float)
    ii = np.asarray(ii, dtype=np.int64)
    jj = np.asarray(jj, dtype=np.int64)
    dx = x[ii] - x[jj]
    dy = y[ii] - y[jj]
    dv = v[ii] - v[jj]
    return _block_max(dx, dy, dv, alpha)


def pcg_solve(indptr, indices, data, b, inv_diag, x0, rtol, maxiter):
    """Jacobi-preconditioned conjugate gradients on a CSR SPD matrix.

    Returns (x, iterations, history) where history holds the relative
    residual at every iteration (including the final one).
    """
    n = len(b)
    A = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    x = np.array(x0, dtype=float, copy=True)
    b = np.asarray(b, dtype=float)
    inv_diag = np.asarray(inv_diag, dtype=float)
    r = b - A @ x
    bnorm = float(np.linalg.norm(b))
    scale = bnorm if bnorm > 0 else 1.0
    hist = [float(np.linalg.norm(r)) / scale]
    if hist[-1] <= rtol:
        return x, 0, np.array(hist)
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    for k in range(1, int(maxiter) + 1):
        Ap = A @ p
        pAp = float(p @ Ap)
        if pAp <= 0:
            break  # matrix not SPD on this subspace
        a = rz / pAp
        x += a * p
        r -= a * Ap
        hist.append(float(np.linalg.norm(r)) / scale)
        if hist[-1] <= rtol:
            return x, k, np.array(hist)
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, len(hist) - 1, np.array(hist)
