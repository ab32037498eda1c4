from .dgp import (
    DGP1_ALPHA,
    DGP2_ALPHA,
    SimulatedInstance,
    dgp1_labels,
    gen_dgp1,
    gen_dgp2,
    replicate_seeds,
)
from .errors import ERROR_PRESETS, ErrorSpec, gen_errors, make_generator
from .harness import (
    ESTIMATORS,
    ReplicateOutcome,
    generate,
    run_replicate,
    run_replicates,
    summarize,
)

__all__ = [
    "DGP1_ALPHA",
    "DGP2_ALPHA",
    "ERROR_PRESETS",
    "ESTIMATORS",
    "ErrorSpec",
    "ReplicateOutcome",
    "SimulatedInstance",
    "dgp1_labels",
    "gen_dgp1",
    "gen_dgp2",
    "gen_errors",
    "generate",
    "make_generator",
    "replicate_seeds",
    "run_replicate",
    "run_replicates",
    "summarize",
]
