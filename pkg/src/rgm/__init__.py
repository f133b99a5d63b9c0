"""Transform sampling between heterogeneous spaces via reversible map pairs.

The package fits a forward map and a backward map between two empirical
measures by minimizing a quadratic cost-alignment term plus kernel (or
Sinkhorn) discrepancy penalties; it also ships the finite-dimensional
convex relaxation of the same objective and classical Gromov-Wasserstein
lower bounds for comparison.
"""

from .discrepancy import SinkhornConfig, entropic_ot, mmd2, mmd2_product, sinkhorn_divergence
from .errors import (
    ConfigError,
    ConvergenceError,
    DimensionError,
    DivergenceError,
    NormalizationError,
    NotPsdError,
    ParseError,
    RgmError,
    SizeLimitError,
    ZeroSpreadError,
)
from .gwbounds import NetworkSpace, entropic_gw, eccentricity, flb2, gm2_oracle, slb2, w2_1d
from .kernels import (
    KernelSpec,
    eval_kernel,
    fit_standardization,
    gram,
    inner_product,
    mahalanobis,
    mahalanobis_inner,
    polynomial,
    rbf,
)
from .linalg import frobenius_norm, psd_power, sym_eig
from .maps import (
    AdamState,
    LinearMap,
    LinearSpec,
    Mlp,
    MlpSpec,
    adam_step,
    backward,
    forward,
    init_model,
    load_model,
    save_model,
)
from .measures import (
    DatasetPair,
    EmpiricalMeasure,
    gen_circle,
    gen_gaussian,
    gen_segment,
    read_csv,
    write_csv,
)
from .objective import LagrangeWeights, LossBreakdown, c0, grad_wrt_mapped, lagrangian
from .representer import ConvexProblem, ConvexVars, build_problem, gradient, minimize, objective
from .rng import make_rng
from .training import LossTrace, TrainConfig, evaluate, pushforward, train

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
