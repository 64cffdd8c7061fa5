"""Causal contextual bandits with adaptive context.

Simulators for factored two-layer causal environments, a convex-program
driven pure-exploration algorithm with its estimation subroutines,
non-causal baselines, and a reproducible benchmark harness.
"""

from .baselines import BaselineKind, baseline_explore, unif_explore
from .bench import (
    ALGORITHMS,
    RunReport,
    SweepSpec,
    context_thresholds,
    default_beta,
    gen_lower_bound_instance,
    gen_paper_instance,
    gen_random_instance,
    instance_lambda,
    run_experiment,
    run_many,
    run_seed,
    simple_regret,
    sweep,
)
from .env import (
    CausalInstance,
    ContextModel,
    FirstOne,
    LinearMix,
    Lookup,
    Observation,
    Simulator,
    ValidationReport,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    sample_round,
    save_instance,
    transition_threshold,
    true_reward_matrix,
    true_transition_matrix,
    validate_instance,
)
from .explore import (
    EstimationState,
    Policy,
    conv_explore,
    estimate_causal_params,
    estimate_rewards,
    estimate_transitions,
    greedy_policy,
)
from .interventions import DO_NOTHING, Intervention, all_interventions, num_interventions
from .optim import (
    LambdaResult,
    convex_minmax,
    is_frequency_vector,
    lambda_of,
    maximin_lp,
    objective_value,
)
from .thresholds import ThresholdResult, causal_threshold, empirical_q

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "BaselineKind",
    "CausalInstance",
    "ContextModel",
    "DO_NOTHING",
    "EstimationState",
    "FirstOne",
    "Intervention",
    "LambdaResult",
    "LinearMix",
    "Lookup",
    "Observation",
    "Policy",
    "RunReport",
    "Simulator",
    "SweepSpec",
    "ThresholdResult",
    "ValidationReport",
    "all_interventions",
    "baseline_explore",
    "causal_threshold",
    "context_thresholds",
    "conv_explore",
    "convex_minmax",
    "default_beta",
    "empirical_q",
    "estimate_causal_params",
    "estimate_rewards",
    "estimate_transitions",
    "gen_lower_bound_instance",
    "gen_paper_instance",
    "gen_random_instance",
    "greedy_policy",
    "instance_from_dict",
    "instance_lambda",
    "instance_to_dict",
    "is_frequency_vector",
    "lambda_of",
    "load_instance",
    "maximin_lp",
    "num_interventions",
    "objective_value",
    "run_experiment",
    "run_many",
    "run_seed",
    "sample_round",
    "save_instance",
    "simple_regret",
    "sweep",
    "transition_threshold",
    "true_reward_matrix",
    "true_transition_matrix",
    "unif_explore",
    "validate_instance",
]
