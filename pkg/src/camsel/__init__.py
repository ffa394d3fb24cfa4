"""Portfolio-theoretic camera selection under correlated disruptions."""

from .errors import (
    CamselError,
    CapacityError,
    ConfigError,
    InvalidInputError,
    InvalidParameterError,
    MissingSubsetError,
    UnderdeterminedError,
)
from .harness import (
    MetricsReport,
    QualityModel,
    SweepResult,
    delivered_quality,
    evaluate_strategy,
    fit_additive_model,
    load_quality_table,
    sweep_psi,
    sweep_rho,
)
from .optimizer import (
    FitnessValue,
    GAParams,
    SolveResult,
    enforce_psi,
    exact_solver,
    expected_quality,
    fitness,
    ga_solve,
    objective_risk,
    selection_from_indices,
    traditional_select,
)
from .scenario import (
    BetaMoments,
    CameraSpec,
    CorrelationMatrix,
    Scenario,
    beta_moments,
    covariance,
    covariance_matrix,
    expected_resolution,
    expected_resolutions,
)
from .simulator import CopulaFactor, TrialDraw, prepare_copula, run_trials, sample_outcomes, sample_probabilities
from .config import RunConfig, default_config_path, load_run_config, load_scenario

__version__ = "0.1.0"
