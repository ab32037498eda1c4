from .admm import (
    FitResult,
    FusedState,
    initial_state,
    objective_value,
    run_admm,
    solve_beta,
    sum_squared_errors,
    update_duals,
    update_fused,
)
from .config import AdmmConfig, RidgeConfig
from .linear import FusedSystem, conjugate_gradient, solve_system
from .ridge import ridge_init, ridge_objective

__all__ = [
    "AdmmConfig",
    "FitResult",
    "FusedState",
    "FusedSystem",
    "RidgeConfig",
    "conjugate_gradient",
    "initial_state",
    "objective_value",
    "ridge_init",
    "ridge_objective",
    "run_admm",
    "solve_beta",
    "solve_system",
    "sum_squared_errors",
    "update_duals",
    "update_fused",
]
