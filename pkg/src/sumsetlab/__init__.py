"""sumsetlab: exact popular-sum functionals, progression recovery, and
random-sumset missing-element statistics."""

from .errors import ContractViolation, HypothesisNotMet
from .setcore import (
    ConvTable,
    CycSet,
    DoublingReport,
    IntSet,
    autocorrelation,
    convolution,
    doubling_report,
    sumset,
    truncated_sum,
)
from .bounds import APDescriptor, BoundCheck, ap_intersect, freiman_3k3_check, pollard_check
from .structure import ProgressionCover, find_subgroup, recover_progression, wrap
from .randomsum import exact_miss_distribution, mc_estimate, pk_table, tail_bound
from .entropy import binary_entropy, binom_sandwich, binom_tail

__version__ = "0.1.0"

__all__ = [
    "ContractViolation",
    "HypothesisNotMet",
    "IntSet",
    "CycSet",
    "ConvTable",
    "DoublingReport",
    "sumset",
    "convolution",
    "autocorrelation",
    "truncated_sum",
    "doubling_report",
    "BoundCheck",
    "APDescriptor",
    "pollard_check",
    "freiman_3k3_check",
    "ap_intersect",
    "wrap",
    "find_subgroup",
    "recover_progression",
    "ProgressionCover",
    "tail_bound",
    "exact_miss_distribution",
    "mc_estimate",
    "pk_table",
    "binary_entropy",
    "binom_sandwich",
    "binom_tail",
    "__version__",
]
