"""Runtime and drift experiments for (mu+1) evolutionary algorithms on Dynamic BinVal."""

from .bitcore import Bitstring, RandomSource, mutate, new_uniform, uniform_crossover
from .config import ConfigError, ExperimentConfig, emit_config, parse_config
from .drift import (
    AnalyticDriftParams,
    DriftEstimate,
    drift_profile,
    drift_sign_threshold,
    ea_drift_near_optimum,
    ea_state_value,
    ga_drift_near_optimum,
    ga_state_value,
    mc_drift,
    mc_drift_sample,
)
from .environments import (
    DominanceEstimate,
    Environment,
    EnvironmentSpec,
    compare,
    estimate_dominance_pk,
    select_worst,
)
from .evolve import (
    AlgorithmConfig,
    PopulationState,
    RunRecord,
    StepEvent,
    init_population,
    is_degenerate,
    run,
    step,
)
from .harness import (
    CellResult,
    ExperimentResult,
    RuntimeSummary,
    emit_csv,
    generation_limit,
    run_experiment,
    summarize,
    validate_onemax,
)
from .stats import (
    FactorResult,
    MannWhitneyResult,
    RuntimeSample,
    mann_whitney_u,
    max_significant_factor,
)

__version__ = "0.1.0"
