"""Stochastic proximal sampler with stochastic-gradient inner oracles.

A sampling library built around the Gaussian-smoothing proximal scheme: each
outer iteration convolves the current law with N(0, eta I) and then resamples
from the tilted target through a restricted Gaussian oracle, approximated by
interchangeable inner samplers (two-phase SGLD, underdamped Langevin, or
warm-started MALA) that only touch the target through minibatch gradients.
Includes theorem-driven schedule derivation, TV-distance diagnostics, a
vanilla-SGLD baseline, a marginal-histogram TV metric with cached reference
ensembles, and a config-driven benchmark CLI (``proxsamp``).
"""

from .baselines import SgldResult, vanilla_sgld
from .bench import (
    ConfigError,
    ExperimentConfig,
    ResultRow,
    emit_plot_data,
    parse_config_file,
    parse_config_text,
    run_experiment,
)
from .inner import (
    ExactRgoConfig,
    InnerProblem,
    InnerResult,
    InnerStreams,
    MalaInnerConfig,
    SgldInnerConfig,
    UldInnerConfig,
    UldMoments,
    inner_mala,
    inner_sgld,
    inner_uld,
    mala_log_accept,
    rgo_exact_gaussian,
    sgld_noise_scale,
    uld_moments,
)
from .metrics import HistogramSpec, TvEstimate, ensemble_stats, tv_marginal_estimate
from .outer import (
    OuterConfig,
    RunRecord,
    SpsResult,
    SpsStreams,
    inner_step_cost,
    sps_run,
    sps_step,
)
from .reference import ReferenceResult, reference_ensemble
from .rng import stream
from .schedules import (
    MalaSchedule,
    ScheduleInputs,
    SgldSchedule,
    derive_mala_schedule,
    derive_sgld_schedule,
    second_moment_bound_step,
    tv_upper_bound,
)
from .targets import FiniteSumTarget, MiniBatch, MixtureExperimentTarget, QuadraticTarget

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ExactRgoConfig",
    "ExperimentConfig",
    "FiniteSumTarget",
    "HistogramSpec",
    "InnerProblem",
    "InnerResult",
    "InnerStreams",
    "MalaInnerConfig",
    "MalaSchedule",
    "MiniBatch",
    "MixtureExperimentTarget",
    "OuterConfig",
    "QuadraticTarget",
    "ReferenceResult",
    "ResultRow",
    "RunRecord",
    "ScheduleInputs",
    "SgldInnerConfig",
    "SgldResult",
    "SgldSchedule",
    "SpsResult",
    "SpsStreams",
    "TvEstimate",
    "UldInnerConfig",
    "UldMoments",
    "derive_mala_schedule",
    "derive_sgld_schedule",
    "emit_plot_data",
    "ensemble_stats",
    "inner_mala",
    "inner_sgld",
    "inner_step_cost",
    "inner_uld",
    "mala_log_accept",
    "parse_config_file",
    "parse_config_text",
    "reference_ensemble",
    "rgo_exact_gaussian",
    "run_experiment",
    "second_moment_bound_step",
    "sgld_noise_scale",
    "sps_run",
    "sps_step",
    "stream",
    "tv_marginal_estimate",
    "tv_upper_bound",
    "uld_moments",
    "vanilla_sgld",
]
