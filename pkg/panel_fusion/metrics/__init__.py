from .accuracy import percent_correct_L, rmse_bias
from .rand import ReplicateScore, extended_rand_index
from .summary import summarize_replicates

__all__ = [
    "ReplicateScore",
    "extended_rand_index",
    "percent_correct_L",
    "rmse_bias",
    "summarize_replicates",
]
