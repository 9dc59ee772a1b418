"""Model-free tests for serial correlation among linear-regression errors."""

__version__ = "0.1.0"

from .diagnostics import (
    GammaSequence,
    LagMoments,
    NuisanceEstimates,
    RegressionData,
    TestReport,
    durbin_watson,
    estimate_nu4,
    estimate_sigma2,
    gamma_sequence,
    lag_moments,
    portmanteau_test,
    robust_transform,
    t_tau_test,
)
from .errors import (
    ConfigError,
    DegenerateResiduals,
    DimensionError,
    LagOutOfRange,
    NonpositiveVariance,
    NonstationaryParameters,
    ParseError,
    SerialCorrError,
    SingularDesign,
    ZeroLeverageComplement,
)
from .kernels import BACKEND
from .linalg import (
    LagSandwich,
    ResidualMaker,
    compute_residual_maker,
    general_moments,
    lag_sandwich,
    lag_trace,
    null_cov_kernel,
)
from .montecarlo import (
    SimulationResult,
    SimulationScenario,
    generate_design,
    generate_errors,
    null_distribution_study,
    run_scenario,
)
