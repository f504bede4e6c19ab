"""Finite-horizon Bayesian MDP solver with ambiguity-averse priors.

The package solves statistical Markov decision processes whose kernels and
costs depend on an unknown parameter: exact belief-state dynamic
programming for the inner Bayes problem, and worst-case prior search under
an entropic penalty, an Average-Value-at-Risk density cap, or no penalty
at all (robust mode), each certified by a numerical duality gap.
"""

from .ambiguity import (
    SaddleCertificate,
    SaddleResult,
    certify_saddle,
    entropic_objective,
    solve_avar,
    solve_entropic,
    solve_robust,
)
from .bayes import (
    DeterministicPolicy,
    ReachableBeliefTree,
    ValueSolution,
    bayes_cost,
    build_tree,
    evaluate_policy,
    policy_cost_profile,
    solve_bayes,
)
from .belief import PredictiveDistribution, initial_posterior, predictive, update_posterior
from .errors import (
    AmbiguityMDPError,
    BranchCoverageError,
    ConfigError,
    InfeasibleActionError,
    PolicyTreeMismatchError,
    TrajectoryLimitError,
    TreeSizeLimitError,
)
from .model import Belief, ParameterSet, StatisticalMDP, cost_bounds, validate
from .oracle import TrajectoryRecord, enumerate_cost, mc_estimate
from .risk import (
    AvarAmbiguitySet,
    avar_dual,
    avar_quantile,
    bhattacharyya_distance,
    entropic_dual_value,
    entropic_risk,
    expected_cost,
    relative_entropy,
    tilted_prior,
    value_at_risk,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguityMDPError",
    "AvarAmbiguitySet",
    "Belief",
    "BranchCoverageError",
    "ConfigError",
    "DeterministicPolicy",
    "InfeasibleActionError",
    "ParameterSet",
    "PolicyTreeMismatchError",
    "PredictiveDistribution",
    "ReachableBeliefTree",
    "SaddleCertificate",
    "SaddleResult",
    "StatisticalMDP",
    "TrajectoryLimitError",
    "TrajectoryRecord",
    "TreeSizeLimitError",
    "ValueSolution",
    "avar_dual",
    "avar_quantile",
    "bayes_cost",
    "bhattacharyya_distance",
    "build_tree",
    "certify_saddle",
    "cost_bounds",
    "entropic_dual_value",
    "entropic_objective",
    "entropic_risk",
    "enumerate_cost",
    "evaluate_policy",
    "expected_cost",
    "initial_posterior",
    "mc_estimate",
    "policy_cost_profile",
    "predictive",
    "relative_entropy",
    "solve_avar",
    "solve_bayes",
    "solve_entropic",
    "solve_robust",
    "tilted_prior",
    "update_posterior",
    "validate",
    "value_at_risk",
]
