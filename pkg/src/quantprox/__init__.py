"""quantprox: minimum-entropy quantization proxies on finite alphabets.

Given a finite source and a distortion matrix, this package computes the
minimal mutual information compatible with three fidelity criteria
(guaranteed distortion, per-letter excess probability, mean excess
probability), exact minimum-entropy quantizers by enumeration on small
instances, the entropy sandwiches tying the two together, lossless-code
baselines, and a reproducible random-codebook simulator.
"""

from ._kernels import BACKEND
from .codebook import Codebook, SimulationReport, elias_gamma, encode_giveup, encode_waiting, simulate
from .codes import LosslessCode, LosslessVerdict, huffman, lossless_sandwich_check, one_to_one_optimal
from .errors import (
    CodebookExhaustedError,
    DminViolationError,
    InfeasibleBudgetError,
    InfeasibleError,
    InstanceFormatError,
    NotConvergedError,
    QuantproxError,
    SearchTooLargeError,
    TooLargeError,
    ZeroBallMassError,
    ZeroComplementMassError,
)
from .exact import (
    QuantizerSolution,
    SandwichVerdict,
    exact_h_cond_excess,
    exact_h_guaranteed,
    sandwich_check,
    upper_h_excess,
)
from .infotheory import (
    InfoValue,
    binary_divergence,
    binary_entropy,
    conditional_divergence,
    entropy,
    mutual_information,
    tilted_information,
)
from .model import (
    AlphaProfile,
    BallTable,
    ConditionalKernel,
    FeasibilityVerdict,
    InstanceSpec,
    ReproductionDistribution,
    ball_table,
    check_feasibility,
)
from .proxies import (
    ProxySolution,
    alpha_threshold,
    check_markov_relation,
    construct_kernel_cond,
    construct_kernel_guaranteed,
    oracle_grid_min,
    solve_r_cond_excess,
    solve_r_excess,
    solve_r_expected,
    solve_r_guaranteed,
    verify_optimality,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "AlphaProfile",
    "BallTable",
    "Codebook",
    "CodebookExhaustedError",
    "ConditionalKernel",
    "DminViolationError",
    "FeasibilityVerdict",
    "InfeasibleBudgetError",
    "InfeasibleError",
    "InfoValue",
    "InstanceFormatError",
    "InstanceSpec",
    "LosslessCode",
    "LosslessVerdict",
    "NotConvergedError",
    "ProxySolution",
    "QuantizerSolution",
    "QuantproxError",
    "ReproductionDistribution",
    "SandwichVerdict",
    "SearchTooLargeError",
    "SimulationReport",
    "TooLargeError",
    "ZeroBallMassError",
    "ZeroComplementMassError",
    "alpha_threshold",
    "ball_table",
    "binary_divergence",
    "binary_entropy",
    "check_feasibility",
    "check_markov_relation",
    "conditional_divergence",
    "construct_kernel_cond",
    "construct_kernel_guaranteed",
    "elias_gamma",
    "encode_giveup",
    "encode_waiting",
    "entropy",
    "exact_h_cond_excess",
    "exact_h_guaranteed",
    "huffman",
    "lossless_sandwich_check",
    "mutual_information",
    "one_to_one_optimal",
    "oracle_grid_min",
    "sandwich_check",
    "simulate",
    "solve_r_cond_excess",
    "solve_r_excess",
    "solve_r_expected",
    "solve_r_guaranteed",
    "tilted_information",
    "upper_h_excess",
    "verify_optimality",
]
