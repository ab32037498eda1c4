from dataclasses import dataclass

__all__ = ["AdmmConfig", "RidgeConfig"]

LINEAR_SOLVERS = ("krylov", "dense")


@dataclass(frozen=True)
class AdmmConfig:
    """ADMM settings.

    Parameters
    ----------
    psi
        Augmentation parameter of the individual fusion constraints.
    phi
        Augmentation parameter of the period fusion constraints.
    max_iterations
        Maximum number of ADMM iterations.
    tol_primal
        Stop when every constraint residual norm is below this value...
    tol_change
        ... and the sup-norm change of beta between two iterations is below this value.
    linear_solver
        `krylov` for the matrix-free preconditioned conjugate gradient, `dense` to assemble
        and factorize the normal system (small instances only).
    krylov_tol
        Relative residual target of the conjugate gradient.
    krylov_max_iter
        Maximum number of conjugate gradient iterations per solve.
    ridge_epsilon
        Multiple of the identity added to the dense system.

    Examples
    --------
    >>> from panel_fusion import solver

    >>> config = solver.AdmmConfig()
    >>> config.psi, config.phi, config.max_iterations
    (1.0, 1.0, 2000)

    >>> solver.AdmmConfig(tol_primal=0.0)
    Traceback (most recent call last):
    ...
    ValueError: tol_primal must be positive, got 0.0.

    """

    psi: float = 1.0
    phi: float = 1.0
    max_iterations: int = 2000
    tol_primal: float = 1e-4
    tol_change: float = 1e-5
    linear_solver: str = "krylov"
    krylov_tol: float = 1e-10
    krylov_max_iter: int = 1000
    ridge_epsilon: float = 0.0

    def __post_init__(self) -> None:
        for name in ("psi", "phi", "tol_primal", "tol_change", "krylov_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}.")
        for name in ("max_iterations", "krylov_max_iter"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer.")
        if self.ridge_epsilon < 0:
            raise ValueError("ridge_epsilon must be nonnegative.")
        if self.linear_solver not in LINEAR_SOLVERS:
            raise ValueError(
                f"linear_solver must be one of {LINEAR_SOLVERS}, got {self.linear_solver!r}."
            )


@dataclass(frozen=True)
class RidgeConfig:
    """Penalty levels of the ridge fusion initializer.

    Examples
    --------
    >>> from panel_fusion import solver

    >>> solver.RidgeConfig()
    RidgeConfig(lambda_star=0.001, gamma_star=0.001)

    """

    lambda_star: float = 1e-3
    gamma_star: float = 1e-3

    def __post_init__(self) -> None:
        if not (self.lambda_star > 0 and self.gamma_star > 0):
            raise ValueError("lambda_star and gamma_star must be positive.")
