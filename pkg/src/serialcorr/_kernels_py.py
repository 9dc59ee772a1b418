"""Pure numpy implementations of the lag-shift contractions.

Same signatures as the compiled ``_kernels`` module; used when the extension
is not built or when ``SERIALCORR_PURE_PYTHON`` is set.
"""

import numpy as np


def superdiag_sums(g, lags):
    """Sum of the tau-th superdiagonal of ``g`` for each tau in ``lags``."""
    g = np.asarray(g, dtype=np.float64)
    return np.array([np.trace(g, offset=int(t)) for t in lags], dtype=np.float64)


def shifted_column_products(m, lags):
    """Row k of the result for lag tau is sum_i m[i, k] * m[i - tau, k]."""
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    out = np.empty((len(lags), m.shape[1]), dtype=np.float64)
    for a, t in enumerate(lags):
        t = int(t)
        out[a] = np.einsum("ij,ij->j", m[t:], m[: n - t])
    return out


def shifted_pair_traces(g, lags):
    """Return (S, S2) with S[a, b] = tr(P_ta g P_tb g), S2[a, b] = tr(P_ta g P_tb' g).

    ``g`` must be symmetric.
    """
    g = np.asarray(g, dtype=np.float64)
    n = g.shape[0]
    k = len(lags)
    s = np.empty((k, k), dtype=np.float64)
    s2 = np.empty((k, k), dtype=np.float64)
    for a in range(k):
        t1 = int(lags[a])
        for b in range(a, k):
            t2 = int(lags[b])
            top = g[: n - t1]
            low = g[t1:]
            s[a, b] = s[b, a] = np.einsum("ij,ij->", top[:, t2:], low[:, : n - t2])
            s2[a, b] = s2[b, a] = np.einsum("ij,ij->", top[:, : n - t2], low[:, t2:])
    return s, s2


def autocovariances(e, q):
    """gamma_tau = sum_{i > tau} e_i e_{i - tau} for tau = 0..q."""
    e = np.asarray(e, dtype=np.float64)
    n = e.shape[0]
    return np.array([np.dot(e[t:], e[: n - t]) for t in range(q + 1)], dtype=np.float64)


def quartic_sum(a):
    a = np.asarray(a, dtype=np.float64)
    sq = a * a
    return float(np.einsum("ij,ij->", sq, sq))
