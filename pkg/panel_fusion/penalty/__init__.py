from .prox import prox, prox_lasso, prox_mcp, prox_scad, soft_threshold
from .spec import DEFAULT_CONCAVITY, PenaltySpec, penalty_value

__all__ = [
    "DEFAULT_CONCAVITY",
    "PenaltySpec",
    "penalty_value",
    "prox",
    "prox_lasso",
    "prox_mcp",
    "prox_scad",
    "soft_threshold",
]
