import warnings

__all__ = ["convergence_warning", "failed_fit_warning"]


def convergence_warning(iterations: int, residual: float) -> None:
    message = f"""ADMM stopped after {iterations} iterations with primal residual {residual:.3e}. Increase max_iterations or loosen the tolerances."""
    warnings.warn(message=message)


def failed_fit_warning(gamma: float, lambda_: float, error: Exception) -> None:
    message = f"""Fit at gamma={gamma}, lambda={lambda_} failed and is skipped: {error}"""
    warnings.warn(message=message)
