"""Birth-death master equations for SIS epidemics, their moment-closure
reductions, and tooling to quantify each closure's approximation error."""

from .errors import (
    BelowThresholdWarning,
    DegenerateMomentsError,
    DegenerateStateWarning,
    IntegrationError,
    NonFiniteDerivativeError,
    ParameterError,
    StepBudgetError,
)
from .generator import (
    HomogeneousVariant,
    ProbabilityVector,
    RateCoefficients,
    RladParams,
    SisCompleteParams,
    SisHomogeneousParams,
    apply_generator,
    build_rlad,
    build_sis_complete,
    build_sis_homogeneous,
)
from .harness import (
    ErrorScanResult,
    SlopeFit,
    TimeSeriesResult,
    export,
    fit_loglog_slope,
    run_error_scan,
    run_timeseries,
)
from .integrator import (
    IntegratorConfig,
    SteadyResult,
    Trajectory,
    integrate,
    integrate_to_steady,
)
from .models import (
    ModelKind,
    MomentClosure,
    build_rhs,
    default_k0,
    initial_state,
    point_mass,
    prevalence_series,
    rhs_exact,
    rhs_mean_field,
    rhs_moment,
    rhs_pairwise_triple,
)
from .moments import (
    BinomialFit,
    ExpectedCounts,
    MomentState,
    PairwiseState,
    binomial_fit,
    binomial_third_moment,
    binomial_third_raw_moment,
    classic_third_moment,
    classic_triple_closure,
    counts_from_distribution,
    counts_from_moments,
    density_moment,
    limiting_pair_second_moment,
    pair_second_moment,
    raw_moment,
    simplified_binomial_third_moment,
)
from .ssa import (
    SsaConfig,
    empirical_distribution,
    gillespie_path,
    gillespie_run,
    total_variation,
)
from .steady_state import (
    SteadyStateReport,
    build_report,
    quasi_stationary_distribution,
    ss_binomial,
    ss_exact,
    ss_pair,
    ss_triple,
)

__version__ = "0.1.0"
