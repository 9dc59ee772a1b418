"""Residual autocovariance tests for serial correlation in linear regression.

Two studentized statistics are provided: the lag-tau test ``T_tau`` and the
portmanteau test ``T(q)``. Both centre and scale using exact finite-sample
null moments computed from the residual-maker matrix, so no model is assumed
for the regressors or the response. The Durbin-Watson statistic is included
as a baseline.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import stats

from . import kernels
from .errors import (
    DegenerateResiduals,
    DimensionError,
    LagOutOfRange,
    NonpositiveVariance,
    ZeroLeverageComplement,
)
from .linalg import ResidualMaker, compute_residual_maker

logger = logging.getLogger(__name__)

NU4_FLOOR = -2.0
VARIANCE_MODES = ("exact", "shortcut")


@dataclass(frozen=True, eq=False)
class RegressionData:
    y: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=np.float64)
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim == 1:
            x = x[:, None]
        if y.ndim != 1 or x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DimensionError(f"incompatible shapes y{y.shape}, X{x.shape}")
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise DimensionError("data contain non-finite values")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "x", x)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def p(self):
        return self.x.shape[1]


@dataclass(frozen=True)
class GammaSequence:
    gamma: np.ndarray

    @property
    def q(self):
        return len(self.gamma) - 1


@dataclass(frozen=True)
class NuisanceEstimates:
    sigma2_hat: float
    nu4_hat: float
    clamped: bool = False
    nu4_estimated: bool = True


@dataclass(frozen=True, eq=False)
class LagMoments:
    """Null moments for the lags in ``lags``.

    ``m[a] = E gamma_{lags[a]} / sigma^2`` and
    ``v[a, b] = Cov(gamma_{lags[a]}, gamma_{lags[b]}) / (n sigma^4)``.
    """

    lags: tuple
    m: np.ndarray
    v: np.ndarray
    n: int

    def index(self, tau):
        return self.lags.index(tau)


@dataclass(eq=False)
class TestReport:
    __test__ = False  # not a pytest class

    kind: str
    tau_or_q: int
    statistic: float
    p_value: Optional[float]
    reject: bool
    alpha: Optional[float]
    nuisance: Optional[NuisanceEstimates] = None
    moments: Optional[LagMoments] = None
    variance_mode: Optional[str] = None
    robust: bool = False
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        nz = self.nuisance
        mo = self.moments
        return {
            "kind": self.kind,
            "tau_or_q": int(self.tau_or_q),
            "statistic": float(self.statistic),
            "p_value": None if self.p_value is None else float(self.p_value),
            "alpha": self.alpha,
            "reject": bool(self.reject),
            "sigma2_hat": None if nz is None else float(nz.sigma2_hat),
            "nu4_hat": None if nz is None else float(nz.nu4_hat),
            "nu4_clamped": None if nz is None else bool(nz.clamped),
            "lags": None if mo is None else [int(t) for t in mo.lags],
            "m": None if mo is None else [float(x) for x in mo.m],
            "v": None if mo is None else [[float(x) for x in row] for row in mo.v],
            "mode": {
                "variance": self.variance_mode,
                "nu4": None if nz is None else ("estimate" if nz.nu4_estimated else "known"),
                "robust": bool(self.robust),
            },
        }


class StandardizedResidualMaker(ResidualMaker):
    """``D R`` with ``D = diag(r_jj^{-1/2})``: residuals scaled by their own leverage complement.

    Moments follow from the same contractions with ``factor = D R`` and
    ``gram = D R D``.
    """

    def __init__(self, base):
        diag = np.diag(base.r)
        if np.any(diag <= 1e-12):
            j = int(np.argmin(diag))
            raise ZeroLeverageComplement(
                f"observation {j} has leverage complement {diag[j]:.3e}; cannot standardize"
            )
        scale = 1.0 / np.sqrt(diag)
        super().__init__(r=base.r, n=base.n, p=base.p)
        factor = scale[:, None] * base.r
        gram = factor * scale[None, :]
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "_factor", factor)
        object.__setattr__(self, "_gram", 0.5 * (gram + gram.T))

    @property
    def factor(self):
        return self._factor

    @property
    def gram(self):
        return self._gram

    def residuals(self, y):
        return self.scale * super().residuals(y)


def robust_transform(rm):
    return StandardizedResidualMaker(rm)


def gamma_sequence(residuals, q):
    """Raw residual autocovariances ``gamma_tau = sum_{i>tau} e_i e_{i-tau}``, tau = 0..q."""
    e = np.asarray(residuals, dtype=np.float64)
    q = int(q)
    if q < 0 or q >= e.shape[0]:
        raise LagOutOfRange(f"max lag {q} outside [0, {e.shape[0] - 1}]")
    return GammaSequence(gamma=kernels.autocovariances(e, q))


def estimate_sigma2(gamma0, n, p):
    if n <= p:
        raise DimensionError(f"need n > p, got n={n}, p={p}")
    return gamma0 / (n - p)


def estimate_nu4(residuals, rm, sigma2_hat):
    """Moment estimator of the errors' fourth cumulant, floored at -2.

    Matches ``sum e_i^4`` to its expectation
    ``sigma^4 (3 sum_i r_ii^2 + nu4 sum_ij r_ij^4)``.
    """
    if sigma2_hat <= 0:
        raise DegenerateResiduals("sigma2_hat is zero; residuals are all zero")
    e = np.asarray(residuals, dtype=np.float64)
    diag = np.diag(rm.r)
    s4 = sigma2_hat * sigma2_hat
    raw = (np.sum(e**4) - 3.0 * s4 * np.dot(diag, diag)) / (s4 * kernels.quartic_sum(rm.r))
    if raw < NU4_FLOOR:
        return NuisanceEstimates(sigma2_hat=sigma2_hat, nu4_hat=NU4_FLOOR, clamped=True)
    return NuisanceEstimates(sigma2_hat=sigma2_hat, nu4_hat=float(raw))


def lag_moments(rm, q, nu4, lags=None):
    """Null mean/covariance factors of ``gamma_0..gamma_q`` (or only ``lags``)."""
    if lags is None:
        lags = range(int(q) + 1)
    lags = tuple(int(t) for t in lags)
    if min(lags) < 0 or max(lags) >= rm.n:
        raise LagOutOfRange(f"lags {lags} outside [0, {rm.n - 1}]")
    if nu4 < NU4_FLOOR:
        raise ValueError(f"nu4 must be >= {NU4_FLOOR}, got {nu4}")
    m = kernels.superdiag_sums(rm.gram, lags)
    d = kernels.shifted_column_products(rm.factor, lags)
    s, s2 = kernels.shifted_pair_traces(rm.gram, lags)
    v = (nu4 * (d @ d.T) + s + s2) / rm.n
    return LagMoments(lags=lags, m=m, v=0.5 * (v + v.T), n=rm.n)


def _check_lag_range(lag, n, p, what, check_ratio):
    if lag < 1 or lag >= n - p:
        raise LagOutOfRange(f"{what} {lag} outside [1, n - p - 1] = [1, {n - p - 1}]")
    if check_ratio and not lag < (n - p) / 2:
        raise LagOutOfRange(
            f"{what} {lag} must be < (n - p)/2 = {(n - p) / 2:g}; pass check_ratio=False to override"
        )


def _prepare(data, rm, robust):
    if rm is None:
        rm = compute_residual_maker(data.x)
    elif rm.n != data.n or rm.p != data.p:
        raise DimensionError("residual maker does not match the data")
    op = robust_transform(rm) if robust else rm
    return rm, op


def _nuisance(data, rm, e_plain, gamma0_plain, nu4):
    scale = max(float(np.dot(data.y, data.y)), np.finfo(float).tiny)
    if gamma0_plain <= 1e-24 * scale:
        raise DegenerateResiduals("residual sum of squares is zero (perfect fit)")
    sigma2 = estimate_sigma2(gamma0_plain, data.n, data.p)
    if nu4 is None:
        return estimate_nu4(e_plain, rm, sigma2)
    nu4 = float(nu4)
    if nu4 < NU4_FLOOR:
        raise ValueError(f"nu4 must be >= {NU4_FLOOR}, got {nu4}")
    return NuisanceEstimates(sigma2_hat=sigma2, nu4_hat=nu4, nu4_estimated=False)


def _two_sided(t):
    return float(2.0 * stats.norm.sf(abs(t)))


def t_tau_test(data, tau, alpha=0.05, variance_mode="exact", nu4=None, robust=False,
               rm=None, check_ratio=True):
    """Test for lag-``tau`` serial correlation of the regression errors.

    Parameters
    ----------
    data : RegressionData
    tau : int
        Lag under test, ``1 <= tau < n - p``.
    alpha : float
        Significance level for the reported decision.
    variance_mode : {"exact", "shortcut"}
        ``"exact"`` propagates the joint covariance of ``(gamma_tau, gamma_0)``
        through the ratio; ``"shortcut"`` keeps only the ``gamma_tau`` variance,
        which is accurate for designs with iid Gaussian entries.
    nu4 : float or None
        Known fourth cumulant of the errors (0 for Gaussian). ``None`` estimates it.
    robust : bool
        Use leverage-standardized residuals.
    rm : ResidualMaker, optional
        Precomputed residual maker for ``data.x``.
    check_ratio : bool
        Require ``tau < (n - p)/2``.

    Returns
    -------
    TestReport
    """
    if variance_mode not in VARIANCE_MODES:
        raise ValueError(f"variance_mode must be one of {VARIANCE_MODES}")
    tau = int(tau)
    _check_lag_range(tau, data.n, data.p, "lag", check_ratio)
    rm, op = _prepare(data, rm, robust)

    e_plain = rm.residuals(data.y)
    e = op.residuals(data.y) if robust else e_plain
    gam = kernels.autocovariances(e, tau)
    nz = _nuisance(data, rm, e_plain, gam[0] if not robust else float(e_plain @ e_plain), nu4)
    mo = lag_moments(op, tau, nz.nu4_hat, lags=(0, tau))

    n = data.n
    m0, mt = mo.m
    v00, v0t, vtt = mo.v[0, 0], mo.v[0, 1], mo.v[1, 1]
    if variance_mode == "exact":
        g0, g1 = n / m0, -n * mt / m0**2
        var = g0 * g0 * vtt + 2.0 * g0 * g1 * v0t + g1 * g1 * v00
    else:
        var = n * n * vtt / m0**2
    if not var > 0:
        raise NonpositiveVariance(f"null variance of T_{tau} is {var:.3e}")

    stat = np.sqrt(n) * (gam[tau] / gam[0] - mt / m0) / np.sqrt(var)
    pval = _two_sided(stat)
    return TestReport(
        kind="LagTau", tau_or_q=tau, statistic=float(stat), p_value=pval,
        reject=pval < alpha, alpha=alpha, nuisance=nz, moments=mo,
        variance_mode=variance_mode, robust=robust,
    )


def portmanteau_test(data, q, alpha=0.05, nu4=None, robust=False, rm=None, check_ratio=True):
    """Joint test of lags 1..q built from ``sum_tau (2 - gamma_tau/gamma_0)^2``.

    Arguments as for :func:`t_tau_test`.
    """
    q = int(q)
    _check_lag_range(q, data.n, data.p, "max lag", check_ratio)
    rm, op = _prepare(data, rm, robust)

    e_plain = rm.residuals(data.y)
    e = op.residuals(data.y) if robust else e_plain
    gam = kernels.autocovariances(e, q)
    nz = _nuisance(data, rm, e_plain, gam[0] if not robust else float(e_plain @ e_plain), nu4)
    mo = lag_moments(op, q, nz.nu4_hat)

    n = data.n
    m0, mt = mo.m[0], mo.m[1:]
    mu = mt / m0
    grad = np.empty(q + 1)
    grad[0] = 2.0 * n * np.sum(mt * (2.0 - mu)) / m0**2
    grad[1:] = -2.0 * n * (2.0 - mu) / m0
    var = float(grad @ mo.v @ grad)
    if not var > 0:
        raise NonpositiveVariance(f"null variance of T({q}) is {var:.3e}")

    centred = np.sum((2.0 - gam[1:] / gam[0]) ** 2) - np.sum((2.0 - mu) ** 2)
    stat = np.sqrt(n) * centred / np.sqrt(var)
    pval = _two_sided(stat)
    return TestReport(
        kind="Portmanteau", tau_or_q=q, statistic=float(stat), p_value=pval,
        reject=pval < alpha, alpha=alpha, nuisance=nz, moments=mo,
        variance_mode="exact", robust=robust,
    )


def durbin_watson(residuals):
    """Durbin-Watson ``d``; reported for comparison, carries no p-value."""
    e = np.asarray(residuals, dtype=np.float64)
    if e.ndim != 1 or e.shape[0] < 2:
        raise DimensionError("need a 1-d residual vector with n >= 2")
    ss = float(np.dot(e, e))
    if ss == 0.0:
        raise DegenerateResiduals("all residuals are zero")
    d = float(np.sum(np.diff(e) ** 2) / ss)
    return TestReport(kind="DurbinWatson", tau_or_q=1, statistic=d, p_value=None,
                      reject=False, alpha=None)
