"""Monte Carlo size/power studies for the serial-correlation tests.

Every replication draws from its own generator seeded by
``SeedSequence(master_seed, spawn_key=(0, index))``, so results do not depend
on how replications are spread over worker processes.
"""

import logging
import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy import signal, stats

from .diagnostics import RegressionData, portmanteau_test, t_tau_test
from .errors import ConfigError, NonstationaryParameters, SerialCorrError

logger = logging.getLogger(__name__)

ERROR_LAWS = ("normal", "uniform", "gamma")
DESIGN_AR_COEF = 0.2
BURN_IN = 200


def check_stationary(ar):
    ar = tuple(float(c) for c in ar)
    if len(ar) > 2:
        raise NonstationaryParameters("only AR(1) and AR(2) alternatives are supported")
    if len(ar) == 1 and not abs(ar[0]) < 1:
        raise NonstationaryParameters(f"AR(1) coefficient {ar[0]} is not inside (-1, 1)")
    if len(ar) == 2:
        r1, r2 = ar
        if not (r2 + r1 < 1 and r2 - r1 < 1 and abs(r2) < 1):
            raise NonstationaryParameters(f"AR(2) coefficients {ar} violate stationarity")
    return ar


@dataclass(frozen=True)
class SimulationScenario:
    """One table cell.

    ``ar`` holds the error autoregression coefficients: ``()`` is the null,
    ``(rho,)`` an AR(1) and ``(rho1, rho2)`` an AR(2) alternative. ``ma`` adds
    moving-average terms on the innovations (empty by default). ``q == 0``
    runs the lag-``tau`` test, ``q >= 1`` the portmanteau test over lags 1..q.
    """

    n: int
    p: int
    f: int
    law: str = "normal"
    ar: tuple = ()
    ma: tuple = ()
    tau: int = 1
    q: int = 0
    alpha: float = 0.05
    replications: int = 10_000
    master_seed: int = 0
    name: str = ""
    nu4: Optional[float] = None
    variance_mode: str = "exact"
    robust: bool = False
    fixed_design: bool = False
    beta: float = 0.0
    check_ratio: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ar", tuple(float(c) for c in self.ar))
        object.__setattr__(self, "ma", tuple(float(c) for c in self.ma))
        self.validate()

    def validate(self):
        if self.n < 2 or self.p < 1 or self.n - self.p < 2:
            raise ConfigError(f"invalid dimensions n={self.n}, p={self.p}")
        if not 0 <= self.f <= self.p:
            raise ConfigError(f"need 0 <= f <= p, got f={self.f}, p={self.p}")
        if self.law not in ERROR_LAWS:
            raise ConfigError(f"unknown error law {self.law!r}; choose from {ERROR_LAWS}")
        check_stationary(self.ar)
        if self.q < 0 or (self.q == 0 and self.tau < 1):
            raise ConfigError("need q >= 1 (portmanteau) or q == 0 with tau >= 1")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.replications < 1:
            raise ConfigError("replications must be positive")
        if self.variance_mode not in ("exact", "shortcut"):
            raise ConfigError(f"unknown variance mode {self.variance_mode!r}")

    @property
    def test(self):
        return "portmanteau" if self.q else "tau"

    @property
    def lag(self):
        return self.q if self.q else self.tau

    def with_(self, **changes):
        d = asdict(self)
        d.update(changes)
        return SimulationScenario(**d)


@dataclass(eq=False)
class SimulationResult:
    scenario: SimulationScenario
    rejections: int
    errors: int
    statistics: Optional[np.ndarray] = None
    error_codes: dict = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def valid(self):
        return self.scenario.replications - self.errors

    @property
    def rejection_rate(self):
        return self.rejections / self.valid if self.valid else float("nan")

    @property
    def mc_std_error(self):
        rate = self.rejection_rate
        return math.sqrt(rate * (1.0 - rate) / self.valid) if self.valid else float("nan")


def generate_design(n, p, f, rng, coef=DESIGN_AR_COEF):
    """First ``f`` columns stationary AR(1) with N(0,1) innovations, the rest iid t_5."""
    x = np.empty((n, p))
    if f:
        x0 = rng.normal(scale=1.0 / math.sqrt(1.0 - coef * coef), size=f)
        u = rng.normal(size=(n, f))
        x[:, :f], _ = signal.lfilter([1.0], [1.0, -coef], u, axis=0, zi=coef * x0[None, :])
    if p > f:
        x[:, f:] = rng.standard_t(5, size=(n, p - f))
    return x


def draw_innovations(law, size, rng):
    if law == "normal":
        return rng.normal(size=size)
    if law == "uniform":
        return rng.uniform(-1.0, 1.0, size=size)
    if law == "gamma":
        # shape 4, scale 1/2: mean 2, variance 1
        return rng.gamma(4.0, 0.5, size=size) - 2.0
    raise ValueError(f"unknown error law {law!r}")


def generate_errors(n, law, ar, rng, burn_in=BURN_IN, ma=()):
    """iid innovations for the null, else an ARMA recursion started at zero.

    The first ``burn_in`` values of the recursion are discarded.
    """
    ar = check_stationary(ar)
    if not ar and not ma:
        return draw_innovations(law, n, rng)
    innov = draw_innovations(law, n + burn_in, rng)
    return signal.lfilter([1.0, *ma], [1.0, *(-c for c in ar)], innov)[burn_in:]


def _rep_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0, index)))


def _fixed_design(s):
    rng = np.random.default_rng(np.random.SeedSequence(s.master_seed, spawn_key=(1,)))
    return generate_design(s.n, s.p, s.f, rng)


def simulate_dataset(s, index, design=None):
    """The ``(y, X)`` pair replication ``index`` of scenario ``s`` runs on."""
    if design is None and s.fixed_design:
        design = _fixed_design(s)
    rng = _rep_rng(s.master_seed, index)
    x = design if design is not None else generate_design(s.n, s.p, s.f, rng)
    eps = generate_errors(s.n, s.law, s.ar, rng, ma=s.ma)
    y = x.sum(axis=1) * s.beta + eps if s.beta else eps
    return y, x


def run_test(s, y, x):
    data = RegressionData(y, x)
    if s.q:
        return portmanteau_test(data, s.q, alpha=s.alpha, nu4=s.nu4, robust=s.robust,
                                check_ratio=s.check_ratio)
    return t_tau_test(data, s.tau, alpha=s.alpha, variance_mode=s.variance_mode, nu4=s.nu4,
                      robust=s.robust, check_ratio=s.check_ratio)


def _run_chunk(args):
    s, start, stop = args
    design = _fixed_design(s) if s.fixed_design else None
    out = np.full((stop - start, 2), np.nan)
    codes = []
    for k, i in enumerate(range(start, stop)):
        y, x = simulate_dataset(s, i, design)
        try:
            rep = run_test(s, y, x)
        except SerialCorrError as exc:
            codes.append(exc.code)
            continue
        out[k] = rep.statistic, rep.p_value
    return out, codes


def _chunks(total, workers):
    size = max(1, min(500, math.ceil(total / (4 * workers))))
    return [(a, min(a + size, total)) for a in range(0, total, size)]


def replicate(s, workers=1):
    """Statistic and p-value for every replication (NaN rows for errored ones)."""
    tasks = [(s, a, b) for a, b in _chunks(s.replications, workers)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    values = np.concatenate([p[0] for p in parts])
    codes = Counter(c for p in parts for c in p[1])
    return values, dict(sorted(codes.items()))


def run_scenario(s, workers=1, keep_statistics=False):
    t0 = time.perf_counter()
    values, codes = replicate(s, workers)
    ok = ~np.isnan(values[:, 1])
    rejections = int(np.sum(values[ok, 1] < s.alpha))
    errors = int(np.sum(~ok))
    if errors:
        logger.warning("%s: %d of %d replications errored %s", s.name, errors, s.replications, codes)
    return SimulationResult(
        scenario=s, rejections=rejections, errors=errors,
        statistics=values[:, 0] if keep_statistics else None,
        error_codes=codes, elapsed=time.perf_counter() - t0,
    )


@dataclass(eq=False)
class NullDistribution:
    statistics: np.ndarray
    ks_statistic: float
    ks_pvalue: float
    errors: int


def null_distribution_study(s, workers=1):
    """Statistic sample under the null and its Kolmogorov-Smirnov distance to N(0, 1)."""
    if s.ar or s.ma:
        raise ConfigError("null distribution study requires the null scenario (ar = ())")
    values, _ = replicate(s, workers)
    sample = values[:, 0]
    clean = sample[~np.isnan(sample)]
    ks = stats.kstest(clean, "norm")
    return NullDistribution(statistics=sample, ks_statistic=float(ks.statistic),
                            ks_pvalue=float(ks.pvalue), errors=int(np.isnan(sample).sum()))
