"""Sumset entropy inequalities and q-ary polar codes with tuned 2x2 kernels.

Two halves that meet in the middle: additive-combinatorics tooling (sumsets,
MSTD sets, Sidon sets, exact entropy gaps between X+Y and X-Y) and a polar
coding stack over prime fields whose kernel coefficient is chosen by the same
entropy comparison.
"""

from .channels import AdditiveChannel, FiniteChannel, mutual_information, one_step_transform
from .distributions import (
    CyclicDistribution,
    ExactLogRatio,
    IntegerDistribution,
    convolve_integer,
    dft,
    entropy,
    entropy_diff_sum_minus_diff,
    exact_entropy_diff_uniform,
    negate,
    weighted_convolve,
)
from .errors import BudgetError
from .kernels import (
    Kernel,
    SpreadReport,
    conditional_spread,
    is_prime,
    optimal_coefficient,
    support_condition,
    two_optimal_kernel,
)
from .polar import (
    PolarCode,
    ReliabilityProfile,
    construct,
    encode,
    encode_inverse,
    noise_digest,
    sc_decode,
    sc_posteriors,
    select_frozen,
)
from .simulate import (
    BlerPoint,
    MartingalePath,
    bler_curve,
    martingale_sample,
    spread_scatter,
)
from .sumsets import (
    IntSet,
    SteinTrace,
    difference_set,
    dilate,
    find_target_diff,
    is_mstd,
    mstd_search,
    product_embed,
    sidon_set,
    sidon_stein_gap,
    stein_iterate,
    sumset,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveChannel",
    "BlerPoint",
    "BudgetError",
    "CyclicDistribution",
    "ExactLogRatio",
    "FiniteChannel",
    "IntSet",
    "IntegerDistribution",
    "Kernel",
    "MartingalePath",
    "PolarCode",
    "ReliabilityProfile",
    "SpreadReport",
    "SteinTrace",
    "bler_curve",
    "conditional_spread",
    "construct",
    "convolve_integer",
    "dft",
    "difference_set",
    "dilate",
    "encode",
    "encode_inverse",
    "entropy",
    "entropy_diff_sum_minus_diff",
    "exact_entropy_diff_uniform",
    "find_target_diff",
    "is_mstd",
    "is_prime",
    "martingale_sample",
    "mstd_search",
    "mutual_information",
    "negate",
    "noise_digest",
    "one_step_transform",
    "optimal_coefficient",
    "product_embed",
    "sc_decode",
    "sc_posteriors",
    "select_frozen",
    "sidon_set",
    "sidon_stein_gap",
    "spread_scatter",
    "stein_iterate",
    "sumset",
    "support_condition",
    "two_optimal_kernel",
    "weighted_convolve",
]
