"""difflab: a numerical laboratory for porous-medium and fast-diffusion
equations with drift, their Lipschitz-type decay functionals, and sharp-rate
verification."""

from .admissibility import (
    AdmissibilityReport,
    CoefficientSet,
    Interval,
    admissible_interval,
    check,
    coefficients,
)
from .errors import (
    ConfigError,
    CoverageError,
    DomainError,
    InstabilityError,
    NumericalFailureError,
)
from .fields import RadialField, RadialGrid, l1_distance, l1_distance_to
from .functionals import (
    FunctionalRequest,
    FunctionalSeries,
    aronson_benilan_min,
    fisher_information,
    lipschitz_functional,
    relative_error,
    tail_norm,
    weighted_gradient_gap,
)
from .params import DiffusionParams, Potential, make_potential
from .profiles import (
    BarenblattProfile,
    DirichletSeparable,
    dirichlet_separable,
    gap_decay_exponent,
    profile_constant,
    sharp_decay_exponent,
)
from .ratefit import RateFit, fit_exponential, fit_power, verify_bound
from .rescaling import TO_DRIFTLESS, TO_FOKKER_PLANCK, ScalingMap, map_field, map_time, transfer_series
from .solver import (
    InitialSpec,
    SolverConfig,
    Trajectory,
    build_initial,
    cfl_dt,
    far_field_boundary,
    run,
    step,
)

__version__ = "0.1.0"
