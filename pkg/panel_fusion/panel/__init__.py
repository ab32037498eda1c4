from .data import PanelData, build_design, check_coefficients
from .fusion import (
    FusionIndex,
    build_fusion_index,
    fused_differences,
    fusion_matrices,
    scatter_individual,
    scatter_period,
)
from .partition import BlockPartition

__all__ = [
    "BlockPartition",
    "FusionIndex",
    "PanelData",
    "build_design",
    "build_fusion_index",
    "check_coefficients",
    "fused_differences",
    "fusion_matrices",
    "scatter_individual",
    "scatter_period",
]
