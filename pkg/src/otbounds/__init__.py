"""Exact information-theoretic bounds and simulations for oblivious-transfer reductions."""

__version__ = "0.1.0"

from .dist import Channel, Dist, JointDist, MultiDist, SubDist, compose, condition, marginal, power, product, stat_distance
from .entropy import (
    EntropyReport,
    binary_entropy,
    entropy,
    max_entropy_cond,
    min_entropy_cond,
    mutual_info,
    mutual_info_cond,
    shannon_cond,
    shannon_cond_rev,
    smooth_max_entropy,
    smooth_min_entropy,
)
from .errors import AlphabetOverflow, DomainError, OTBoundsError, ParseError
from .primitives import PrimitiveSpec, make_function, make_ot_randomness, make_rabin_randomness, parse_primitive
from .structure import common_part, reduce, sufficient_stat

__all__ = [
    "AlphabetOverflow",
    "Channel",
    "Dist",
    "DomainError",
    "EntropyReport",
    "JointDist",
    "MultiDist",
    "OTBoundsError",
    "ParseError",
    "PrimitiveSpec",
    "SubDist",
    "__version__",
    "binary_entropy",
    "common_part",
    "compose",
    "condition",
    "entropy",
    "make_function",
    "make_ot_randomness",
    "make_rabin_randomness",
    "marginal",
    "max_entropy_cond",
    "min_entropy_cond",
    "mutual_info",
    "mutual_info_cond",
    "parse_primitive",
    "power",
    "product",
    "reduce",
    "shannon_cond",
    "shannon_cond_rev",
    "smooth_max_entropy",
    "smooth_min_entropy",
    "stat_distance",
    "sufficient_stat",
]
