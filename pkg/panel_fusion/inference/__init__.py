from .hypothesis import (
    HypothesisSpec,
    chi_square_test,
    confidence_region_contains,
    difference_contrast,
)
from .post import (
    PostEstimate,
    coefficient_table,
    oracle_estimate,
    post_estimate,
    standard_errors,
)
from .recovery import block_separation, recover_blocks

__all__ = [
    "HypothesisSpec",
    "PostEstimate",
    "block_separation",
    "chi_square_test",
    "coefficient_table",
    "confidence_region_contains",
    "difference_contrast",
    "oracle_estimate",
    "post_estimate",
    "recover_blocks",
    "standard_errors",
]
