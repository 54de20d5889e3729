import numpy as np
import pytest
import scipy.sparse as sp

from oscbound import kernels
from oscbound.kernels import pyfallback


@pytest.fixture(scope="module")
def cloud():
    rng = np.random.default_rng(12)
    n = 700
    x, y, v = (np.ascontiguousarray(a) for a in rng.normal(size=(3, n)))
    return x, y, v


@pytest.mark.parametrize("alpha", [1.0, 0.5, 0.31])
def test_pair_quotient_backends_agree(cloud, alpha):
    x, y, v = cloud
    assert kernels.pair_quotient_max(x, y, v, alpha) == pytest.approx(
        pyfallback.pair_quotient_max(x, y, v, alpha), rel=1e-15)


def test_pair_quotient_cross_backends_agree(cloud):
    x, y, v = cloud
    k = 200
    a = kernels.pair_quotient_max_cross(x[:k], y[:k], v[:k], x[k:], y[k:], v[k:], 1.0)
    b = pyfallback.pair_quotient_max_cross(x[:k], y[:k], v[:k], x[k:], y[k:], v[k:], 1.0)
    assert a == pytest.approx(b, rel=1e-15)


def test_pair_quotient_indexed_backends_agree(cloud):
    x, y, v = cloud
    rng = np.random.default_rng(3)
    ii = np.ascontiguousarray(rng.integers(0, len(x), 5000))
    jj = np.ascontiguousarray(rng.integers(0, len(x), 5000))
    a = kernels.pair_quotient_max_indexed(x, y, v, ii, jj, 0.8)
    b = pyfallback.pair_quotient_max_indexed(x, y, v, ii, jj, 0.8)
    assert a == pytest.approx(b, rel=1e-15)


def test_pair_quotient_brute_force_oracle():
    rng = np.random.default_rng(8)
    x, y, v = (np.ascontiguousarray(a) for a in rng.normal(size=(3, 60)))
    best = 0.0
    for i in range(60):
        for j in range(i + 1, 60):
            d = np.hypot(x[i] - x[j], y[i] - y[j])
            if d > 0:
                best = max(best, abs(v[i] - v[j]) / d**0.7)
    assert kernels.pair_quotient_max(x, y, v, 0.7) == pytest.approx(best, rel=1e-13)


def _spd_system(n=120, seed=5):
    rng = np.random.default_rng(seed)
    A = sp.random(n, n, density=0.08, random_state=np.random.RandomState(seed), format="csr")
    A = A + A.T + n * sp.eye(n, format="csr")
    A = A.tocsr()
    b = rng.normal(size=n)
    return A, b


def test_pcg_matches_direct_solve():
    A, b = _spd_system()
    inv_diag = 1.0 / A.diagonal()
    x, nit, hist = kernels.pcg_solve(A.indptr.astype(np.int64), A.indices.astype(np.int64),
                                     A.data, b, inv_diag, np.zeros(len(b)), 1e-12, 10_000)
    direct = np.linalg.solve(A.toarray(), b)
    assert hist[-1] <= 1e-12
    assert np.abs(x - direct).max() <= 1e-9
    assert len(hist) == nit + 1


def test_pcg_backends_agree():
    A, b = _spd_system(seed=6)
    inv_diag = 1.0 / A.diagonal()
    args = (A.indptr.astype(np.int64), A.indices.astype(np.int64), A.data, b,
            inv_diag, np.zeros(len(b)), 1e-11, 10_000)
    x1, _, _ = kernels.pcg_solve(*args)
    x2, _, _ = pyfallback.pcg_solve(*args)
    assert np.abs(x1 - x2).max() <= 1e-9


def test_pcg_zero_rhs():
    A, _ = _spd_system(seed=7)
    z = np.zeros(A.shape[0])
    x, nit, hist = kernels.pcg_solve(A.indptr.astype(np.int64), A.indices.astype(np.int64),
                                     A.data, z, 1.0 / A.diagonal(), z.copy(), 1e-10, 100)
    assert nit == 0
    assert np.all(x == 0)


def test_backend_reports_identity():
    assert kernels.BACKEND in ("compiled", "python")
