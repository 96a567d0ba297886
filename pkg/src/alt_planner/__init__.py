"""Sequential test planning for accelerated life tests."""

from .acquisition import EiScore, KgLine, current_best, ei_score, expected_max_gain, kg_lines, predictive_params, select_next
from .errors import ConfigError, DimensionError, NonIdentifiableError, PlannerError, ScheduleExhaustedError
from .harness import StudyConfig, StudyResult, SyntheticTruth, estimate_pcs, gen_truth, run_replication, run_study, simulate_observation, write_csvs
from .model import CandidateSet, DesignPoint, Observation, PosteriorState, feature_map, mean_log_life
from .numerics import TruncatedNormalMoments, mills_lambda, norm_cdf, norm_pdf, truncated_normal_moments
from .policy import DecisionTrack, PolicyKind, PolicyState, build_factorial_schedule, decide_best, next_design
from .update import MleFit, UpdateForm, absorb, censored_posterior_variance, censored_update, conjugate_update, mle_refit

__version__ = "0.1.0"

__all__ = [
    "CandidateSet", "ConfigError", "DecisionTrack", "DesignPoint", "DimensionError",
    "EiScore", "KgLine", "MleFit", "NonIdentifiableError", "Observation",
    "PlannerError", "PolicyKind", "PolicyState", "PosteriorState",
    "ScheduleExhaustedError", "StudyConfig", "StudyResult", "SyntheticTruth",
    "TruncatedNormalMoments", "UpdateForm", "absorb", "build_factorial_schedule",
    "censored_posterior_variance", "censored_update", "conjugate_update",
    "current_best", "decide_best", "ei_score", "estimate_pcs", "expected_max_gain",
    "feature_map", "gen_truth", "kg_lines", "mean_log_life", "mills_lambda",
    "mle_refit", "next_design", "norm_cdf", "norm_pdf", "predictive_params",
    "run_replication", "run_study", "select_next", "simulate_observation",
    "truncated_normal_moments", "write_csvs",
]
