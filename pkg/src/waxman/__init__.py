"""Fitting Waxman random spatial graphs: generation, (q, s) estimation, bounds and sweeps."""

from .analysis import (
    FisherReport,
    cr_bound_for_degree,
    crbound_table,
    fisher_information,
    kld_from_ger,
    kld_large_s,
    model_moments,
)
from .errors import (
    ConvergenceError,
    DataError,
    InfeasibleParametersError,
    InsufficientDataError,
    ParameterError,
    WaxmanError,
)
from .estimators import (
    EstimateResult,
    Method,
    glm_fit,
    loglinear_s,
    mle_e,
    mle_n,
    mle_q,
    mle_s,
    mle_truncated,
)
from .generator import (
    Graph,
    SummaryStats,
    generate_dastb,
    generate_waxman,
    q_for_target_degree,
    summary_stats,
)
from .geometry import (
    DistanceLaw,
    Metric,
    Region,
    RegionKind,
    all_pair_distances,
    analytic_inverse_cdf,
    empirical_inverse_cdf,
    line_picking_pdf,
    sample_points,
)
from .io import ingest, write_graph
from .sweep import ExperimentSpec, run_robustness, run_sweep
from .transforms import laplace, mean_link_length, mle_equation

__version__ = "0.1.0"
