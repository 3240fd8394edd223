"""Online learning from discriminative feature feedback with exceptions."""

from .core import (
    EXCEEDS_MAX,
    Component,
    Example,
    Instance,
    Literal,
    Representation,
    ValidationReport,
    dump_instance,
    expand_representation,
    hypercube_lower_bound_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    min_exception_free_size,
    normalize_disjoint,
    validate_instance,
)
from .harness import TranscriptRow, TrialReport, run_config, run_trial, sweep, verify_bounds
from .learner import Delta, PredictionOutcome, RobustDFF, Rule, handle_mistake
from .stochastic import StRoDFF, gamma, q, rule_budget
from .streams import (
    AdaptiveAdversary,
    GenerationError,
    StochasticSampler,
    adversarial_stream,
    gen_random_instance,
    lower_bound_instance,
    lower_bound_stream,
)
from .teacher import ExceptionStrategy, Feedback, FeedbackAuditor, Teacher

__version__ = "0.1.0"

__all__ = [
    "EXCEEDS_MAX", "Component", "Example", "Instance", "Literal", "Representation",
    "ValidationReport", "dump_instance", "expand_representation",
    "hypercube_lower_bound_instance", "instance_from_dict", "instance_to_dict",
    "load_instance", "min_exception_free_size", "normalize_disjoint", "validate_instance",
    "TranscriptRow", "TrialReport", "run_config", "run_trial", "sweep", "verify_bounds",
    "Delta", "PredictionOutcome", "RobustDFF", "Rule", "handle_mistake",
    "StRoDFF", "gamma", "q", "rule_budget",
    "AdaptiveAdversary", "GenerationError", "StochasticSampler", "adversarial_stream",
    "gen_random_instance", "lower_bound_instance", "lower_bound_stream",
    "ExceptionStrategy", "Feedback", "FeedbackAuditor", "Teacher",
]
