"""Timing comparison: compiled kernels vs the pure-numpy fallback.

Runs the Hölder-seminorm pair scan on point clouds of growing size and
the preconditioned CG solve on a disk Laplacian system, with both
backends, and prints one table.  Usage:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from oscbound import kernels
from oscbound.coefficients import identity_field
from oscbound.geometry import Disk
from oscbound.kernels import pyfallback
from oscbound.meshing import mesh_domain
from oscbound.solver import assemble_stiffness

try:
    compiled = kernels._ext
except AttributeError:
    compiled = None


def timeit(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pair_scan(rows):
    rng = np.random.default_rng(0)
    for n in (1000, 2000, 4000, 8000):
        x, y, v = (np.ascontiguousarray(a) for a in rng.normal(size=(3, n)))
        t_py, r_py = timeit(pyfallback.pair_quotient_max, x, y, v, 1.0)
        if compiled is not None:
            t_c, r_c = timeit(compiled.pair_quotient_max, x, y, v, 1.0)
            assert r_c == r_py
        else:
            t_c = float("nan")
        rows.append((f"pair scan n={n} ({n * (n - 1) // 2} pairs)", t_py, t_c))


def bench_pcg(rows):
    for h in (0.04, 0.02):
        mesh = mesh_domain(Disk(), h)
        K = assemble_stiffness(mesh, identity_field())
        iidx = np.flatnonzero(~mesh.boundary)
        Kii = K[iidx][:, iidx].tocsr()
        rng = np.random.default_rng(1)
        b = rng.normal(size=Kii.shape[0])
        args = (Kii.indptr.astype(np.int64), Kii.indices.astype(np.int64), Kii.data,
                b, 1.0 / Kii.diagonal(), np.zeros(len(b)), 1e-10, 50_000)
        t_py, (x_py, it_py, _) = timeit(pyfallback.pcg_solve, *args, repeat=2)
        if compiled is not None:
            t_c, (x_c, it_c, _) = timeit(compiled.pcg_solve, *args, repeat=2)
            assert np.abs(x_c - x_py).max() <= 1e-8 * max(1.0, np.abs(x_py).max())
            label_it = f"{it_c} iters"
        else:
            t_c = float("nan")
            label_it = f"{it_py} iters"
        rows.append((f"pcg h={h} (n={Kii.shape[0]}, {label_it})", t_py, t_c))


def main():
    print(f"active backend: {kernels.BACKEND}")
    if compiled is None:
        print("compiled extension unavailable; timing the fallback only\n")
    rows = []
    bench_pair_scan(rows)
    bench_pcg(rows)
    w = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{w}}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for label, t_py, t_c in rows:
        speedup = t_py / t_c if t_c == t_c and t_c > 0 else float("nan")
        print(f"{label:<{w}}  {t_py * 1e3:>8.1f}ms  {t_c * 1e3:>8.1f}ms  {speedup:>7.1f}x")


if __name__ == "__main__":
    main()
