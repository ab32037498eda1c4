from .exceptions import (
    DegenerateFitError,
    PanelFormatError,
    PathError,
    SingularBlockError,
    SolverError,
)
from .iter import progress
from .warnings import convergence_warning, failed_fit_warning
from .io import average_periods, export_csv, export_instance, ingest_csv

__all__ = [
    "DegenerateFitError",
    "PanelFormatError",
    "PathError",
    "SingularBlockError",
    "SolverError",
    "average_periods",
    "convergence_warning",
    "export_csv",
    "export_instance",
    "failed_fit_warning",
    "ingest_csv",
    "progress",
]
