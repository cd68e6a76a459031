"""Divergences of quantum channels and process tensors (quantum combs).

Labeled operators and link products, channels and superchannels, combs and
superprocesses, Choi and generalized divergences with numerical lower bounds,
and the counterexamples showing that Choi divergences are not contractive.
"""
from .channel import (
    ChoiChannel,
    KrausChannel,
    Superchannel,
    apply_choi,
    apply_superchannel,
    choi_from_kraus,
    depolarizing_channel,
    identity_channel,
    kraus_channel,
    replacement_channel,
    validate_choi_channel,
)
from .comb import (
    ProcessComb,
    choi_control_comb,
    coarse_grain,
    contract,
    link_product,
    marginal_comb,
    markov_comb,
    process_comb,
    validate_comb,
)
from .divergence import (
    Measure,
    Tester,
    apply_tester,
    choi_divergence,
    classical_divergence,
    input_output_correlation,
    non_markovianity,
    relative_entropy,
    total_correlations,
    trace_distance,
)
from .estimators import ClassicalCombDivergence, GeneralizedChannelDivergence, GeneralizedCombDivergence
from .exceptions import CombError
from .operators import LabeledOperator, Subsystem, link, operator, partial_trace, permute, relabel, tensor
from .optimizer import (
    OptimizationResult,
    OptimizerConfig,
    check_monotonicity,
    classical_comb_divergence,
    generalized_channel_divergence,
    generalized_comb_divergence,
    steering_channel,
)
from .superprocess import Superprocess, apply_superprocess, dual_superprocess

__version__ = "0.1.0"

__all__ = [
    "apply_choi",
    "apply_superchannel",
    "apply_superprocess",
    "apply_tester",
    "check_monotonicity",
    "choi_control_comb",
    "choi_divergence",
    "choi_from_kraus",
    "ChoiChannel",
    "classical_comb_divergence",
    "classical_divergence",
    "ClassicalCombDivergence",
    "coarse_grain",
    "CombError",
    "contract",
    "depolarizing_channel",
    "dual_superprocess",
    "generalized_channel_divergence",
    "generalized_comb_divergence",
    "GeneralizedChannelDivergence",
    "GeneralizedCombDivergence",
    "identity_channel",
    "input_output_correlation",
    "kraus_channel",
    "KrausChannel",
    "LabeledOperator",
    "link",
    "link_product",
    "marginal_comb",
    "markov_comb",
    "Measure",
    "non_markovianity",
    "operator",
    "OptimizationResult",
    "OptimizerConfig",
    "partial_trace",
    "permute",
    "process_comb",
    "ProcessComb",
    "relabel",
    "relative_entropy",
    "replacement_channel",
    "steering_channel",
    "Subsystem",
    "Superchannel",
    "Superprocess",
    "tensor",
    "Tester",
    "total_correlations",
    "trace_distance",
    "validate_choi_channel",
    "validate_comb",
]
