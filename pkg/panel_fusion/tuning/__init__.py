from .bic import bic_score, bic_value
from .grid import GRID_PRESETS, TuningGrid, grid_range
from .path import GridPoint, PathResult, fit_point, select_point, solution_path

__all__ = [
    "GRID_PRESETS",
    "GridPoint",
    "PathResult",
    "TuningGrid",
    "bic_score",
    "bic_value",
    "fit_point",
    "grid_range",
    "select_point",
    "solution_path",
]
