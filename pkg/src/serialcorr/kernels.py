"""Backend selection for the hot lag-shift kernels.

The compiled extension is used when importable. Set ``SERIALCORR_PURE_PYTHON=1``
to force the numpy fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SERIALCORR_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def superdiag_sums(g, lags):
    return _impl.superdiag_sums(_c(g), lags)


def shifted_column_products(m, lags):
    return _impl.shifted_column_products(_c(m), lags)


def shifted_pair_traces(g, lags):
    return _impl.shifted_pair_traces(_c(g), lags)


def autocovariances(e, q):
    return _impl.autocovariances(_c(e), int(q))


def quartic_sum(a):
    return float(_impl.quartic_sum(_c(a)))
