"""Selection hyper-heuristics on LeadingOnes.

Simulation of operator-selection mechanisms (random, permutation, greedy,
random gradient, and generalised/adaptive random gradient) over RLS_m
portfolios, plus exact best-possible runtime tables to compare against.
"""

from .fitness import BitString, evaluate_full, evaluate_incremental
from .harness import (
    BatchSummary,
    ConfigError,
    ExperimentConfig,
    TrialResult,
    resolve,
    run_batch,
    run_trial,
    summarize,
    sweep,
)
from .mechanisms import (
    ARG,
    GRG,
    MECHANISM_NAMES,
    Greedy,
    Permutation,
    RandomGradient,
    SimpleRandom,
    make_mechanism,
)
from .operators import (
    Portfolio,
    improvement_probability,
    mutate,
    optimal_operator,
)
from .schedules import SIGMA_SCHEDULES, cstar, parse_tau, resolve_sigma
from .theory import (
    best_possible_runtime,
    expected_opt_runtime,
    leading_constant,
    p_opt,
    region_bounds,
    tau_max,
    theory_table,
)

__version__ = "0.1.0"

__all__ = [
    "ARG",
    "BatchSummary",
    "BitString",
    "ConfigError",
    "ExperimentConfig",
    "GRG",
    "Greedy",
    "MECHANISM_NAMES",
    "Permutation",
    "Portfolio",
    "RandomGradient",
    "SIGMA_SCHEDULES",
    "SimpleRandom",
    "TrialResult",
    "best_possible_runtime",
    "cstar",
    "evaluate_full",
    "evaluate_incremental",
    "expected_opt_runtime",
    "improvement_probability",
    "leading_constant",
    "make_mechanism",
    "mutate",
    "optimal_operator",
    "p_opt",
    "parse_tau",
    "region_bounds",
    "resolve",
    "resolve_sigma",
    "run_batch",
    "run_trial",
    "summarize",
    "sweep",
    "tau_max",
    "theory_table",
    "__version__",
]
