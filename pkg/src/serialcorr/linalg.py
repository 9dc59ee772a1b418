"""Residual-maker matrix and the lag-shifted trace quantities built from it.

Lag matrices ``P_tau`` (ones where row - column == tau) are never formed;
every product with one is an index shift.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimensionError, LagOutOfRange, SingularDesign

#: smallest singular value of X must exceed this fraction of the largest
SINGULAR_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class ResidualMaker:
    """Symmetric idempotent ``R = I - X (X'X)^{-1} X'`` for an ``n x p`` design.

    ``factor`` and ``gram`` are the matrices the moment formulas consume:
    residuals are ``factor @ eps`` and ``gram = factor @ factor.T``. For the
    plain residual maker both are ``R`` itself.
    """

    r: np.ndarray
    n: int
    p: int

    @property
    def factor(self):
        return self.r

    @property
    def gram(self):
        return self.r

    def residuals(self, y):
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.n,):
            raise DimensionError(f"response has shape {y.shape}, expected ({self.n},)")
        return self.r @ y


@dataclass(frozen=True, eq=False)
class LagSandwich:
    tau: int
    b: np.ndarray


def _validate_design(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DimensionError(f"design must be 2-d, got {x.ndim}-d")
    n, p = x.shape
    if n < 2 or p < 1:
        raise DimensionError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
    if n - p < 1:
        raise DimensionError(f"need n - p >= 1, got n={n}, p={p}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("design contains non-finite values")
    return x


def compute_residual_maker(x):
    """Build the residual maker of design ``x`` from a reduced QR factorization.

    Raises SingularDesign when the design's condition number exceeds
    ``1 / SINGULAR_RTOL``.
    """
    x = _validate_design(x)
    n, p = x.shape
    q, tri = np.linalg.qr(x, mode="reduced")
    sv = np.linalg.svd(tri, compute_uv=False)
    if sv[-1] <= SINGULAR_RTOL * sv[0]:
        raise SingularDesign(
            f"design is numerically singular (sigma_min/sigma_max = {sv[-1] / sv[0]:.3e})"
        )
    # numpy evaluates q @ q.T as a symmetric rank-k update that mirrors one
    # triangle, so r is exactly symmetric; the spot check guards other BLAS paths
    r = q @ q.T
    np.negative(r, out=r)
    r.flat[:: n + 1] += 1.0
    if not np.array_equal(r[0], r[:, 0]):
        r = 0.5 * (r + r.T)
    return ResidualMaker(r=r, n=n, p=p)


def _check_lag(tau, n):
    tau = int(tau)
    if tau < 0 or tau >= n:
        raise LagOutOfRange(f"lag {tau} outside [0, {n - 1}]")
    return tau


def shift_rows(a, tau):
    """``P_tau @ a``: row i of the result is row ``i - tau`` of ``a``."""
    out = np.zeros_like(a)
    n = a.shape[0]
    out[tau:] = a[: n - tau]
    return out


def lag_trace(rm, tau):
    """``m_tau = tr(P_tau R)``, the sum of the tau-th superdiagonal."""
    tau = _check_lag(tau, rm.n)
    return float(kernels.superdiag_sums(rm.gram, [tau])[0])


def lag_sandwich(rm, tau):
    """``B_tau = R P_tau R``; ``B_0`` is ``R`` itself."""
    tau = _check_lag(tau, rm.n)
    if tau == 0:
        return LagSandwich(tau=0, b=rm.r.copy())
    return LagSandwich(tau=tau, b=rm.r @ shift_rows(rm.r, tau))


def null_cov_kernel(rm, tau1, tau2, nu4):
    """``n * v_{tau1 tau2}``: Cov(gamma_tau1, gamma_tau2) / sigma^4 under the null."""
    lags = [_check_lag(tau1, rm.n), _check_lag(tau2, rm.n)]
    d = kernels.shifted_column_products(rm.factor, lags)
    s, s2 = kernels.shifted_pair_traces(rm.gram, lags)
    return float(nu4 * np.dot(d[0], d[1]) + s[0, 1] + s2[0, 1])


def general_moments(rm, sigma_sqrt, tau1, tau2, nu4):
    """Mean of gamma_tau1 and Cov(gamma_tau1, gamma_tau2) for errors ``sigma_sqrt @ eps``.

    ``eps`` has iid standardized entries with fourth cumulant ``nu4``.
    """
    s_half = np.asarray(sigma_sqrt, dtype=np.float64)
    if s_half.shape != (rm.n, rm.n):
        raise DimensionError(f"sigma_sqrt has shape {s_half.shape}, expected ({rm.n}, {rm.n})")
    tau1 = _check_lag(tau1, rm.n)
    tau2 = _check_lag(tau2, rm.n)
    # A_tau = C' P_tau C with C = R Sigma^{1/2}
    c = rm.r @ s_half
    a1 = c.T @ shift_rows(c, tau1)
    a2 = a1 if tau2 == tau1 else c.T @ shift_rows(c, tau2)
    mean = float(np.trace(a1))
    cov = float(
        nu4 * np.dot(np.diag(a1), np.diag(a2))
        + np.einsum("ij,ji->", a1, a2)
        + np.einsum("ij,ij->", a1, a2)
    )
    return mean, cov
