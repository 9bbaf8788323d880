"""Exact and Monte Carlo experiments on stationary actions of F2 and SL(2,Z)."""

from .boundary import (
    UNIFORM,
    Cylinder,
    EntropyValue,
    InsufficientDepth,
    StepDistribution,
    act_boundary,
    check_stationarity,
    entropy_boundary_exact,
    eta,
    preimage_cylinder,
    rn_exponent,
)
from .skew import (
    OutOfRange,
    ProductCylinder,
    SkewPoint,
    act_skew,
    check_stationarity_skew,
    entropy_skew_exact,
    entropy_skew_mc,
    nu_measure,
    preimage_product_cylinder,
    realize_entropy,
    rn_exponent_skew,
)
from .words import Letter, ReducedWord, common_prefix_len, inverse, multiply, reduce, word

__version__ = "0.1.0"
