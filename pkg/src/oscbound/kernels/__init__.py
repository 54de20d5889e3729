"""Hot numeric kernels with a compiled core and a pure-Python fallback.

The compiled extension is used when it imported successfully and the
environment variable OSCBOUND_PURE_PYTHON is unset; otherwise the numpy
fallback takes over.  Both expose the same callables:

    pair_quotient_max(x, y, v, alpha)
    pair_quotient_max_cross(x1, y1, v1, x2, y2, v2, alpha)
    pair_quotient_max_indexed(x, y, v, ii, jj, alpha)
    pcg_solve(indptr, indices, data, b, inv_diag, x0, rtol, maxiter)
"""

import importlib
import os

from . import pyfallback

_ext = None
if not os.environ.get("OSCBOUND_PURE_PYTHON"):
    try:
        _ext = importlib.import_module(__name__ + "._ext")
    except ImportError:
        _ext = None

BACKEND = "compiled" if _ext is not None else "python"
_impl = _ext if _ext is not None else pyfallback

pair_quotient_max = _impl.pair_quotient_max
pair_quotient_max_cross = _impl.pair_quotient_max_cross
pair_quotient_max_indexed = _impl.pair_quotient_max_indexed
pcg_solve = _impl.pcg_solve
