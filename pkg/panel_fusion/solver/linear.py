import torch

from ..panel import FusionIndex, fusion_matrices
from ..utils.exceptions import SolverError
from .config import AdmmConfig

__all__ = ["FusedSystem", "conjugate_gradient", "solve_system"]


class FusedSystem:
    """Normal operator X^T X + psi Omega^T Omega + phi Phi^T Phi acting on (N, T, P) fields.

    The operator is applied without materializing any fusion matrix: X^T X acts cell-wise
    through the rank-one blocks x_it x_it^T, the individual fusion term as
    psi (N beta_it - sum_j beta_jt) and the period fusion term as
    phi (T beta_it - sum_t' beta_it').

    Parameters
    ----------
    design
        Design tensor of shape (N, T, P).
    psi
        Weight of the individual fusion term.
    phi
        Weight of the period fusion term.

    Examples
    --------
    >>> from panel_fusion import panel, solver
    >>> import torch

    >>> _ = torch.manual_seed(42)

    >>> design = torch.cat([torch.ones(3, 4, 1), torch.randn(3, 4, 1)], dim=-1).double()
    >>> system = solver.FusedSystem(design, psi=1.0, phi=2.0)

    >>> constant = torch.ones(3, 4, 2, dtype=torch.float64)
    >>> fusion_only = solver.FusedSystem(design, psi=1.0, phi=2.0).fusion_matvec(constant)
    >>> float(fusion_only.abs().max())
    0.0

    >>> idx = panel.build_fusion_index(3, 4)
    >>> beta = torch.randn(3, 4, 2, dtype=torch.float64)
    >>> torch.allclose(system.dense(idx) @ beta.flatten(), system.matvec(beta).flatten())
    True

    """

    def __init__(self, design: torch.Tensor, psi: float, phi: float) -> None:
        self.design = design
        self.psi = psi
        self.phi = phi
        self.n_individuals, self.n_periods, self.n_covariates = design.shape
        self.gram = torch.einsum("ntp,ntq->ntpq", design, design)
        self._preconditioner = None

    def fusion_matvec(self, beta: torch.Tensor) -> torch.Tensor:
        out = torch.zeros_like(beta)
        if self.psi:
            out += self.psi * (
                self.n_individuals * beta - beta.sum(dim=0, keepdim=True)
            )
        if self.phi:
            out += self.phi * (self.n_periods * beta - beta.sum(dim=1, keepdim=True))
        return out

    def matvec(self, beta: torch.Tensor) -> torch.Tensor:
        return torch.einsum("ntpq,ntq->ntp", self.gram, beta) + self.fusion_matvec(beta)

    def preconditioner(self) -> torch.Tensor:
        """Inverse of the per-cell diagonal blocks, shape (N, T, P, P)."""
        if self._preconditioner is None:
            eye = torch.eye(self.n_covariates, dtype=self.gram.dtype)
            shift = self.psi * (self.n_individuals - 1) + self.phi * (
                self.n_periods - 1
            )
            blocks = self.gram + shift * eye
            jitter = 1e-10 * max(1.0, float(blocks.diagonal(dim1=-2, dim2=-1).mean()))
            self._preconditioner = torch.linalg.inv(blocks + jitter * eye)
        return self._preconditioner

    def precondition(self, residual: torch.Tensor) -> torch.Tensor:
        return torch.einsum("ntpq,ntq->ntp", self.preconditioner(), residual)

    def dense(self, idx: FusionIndex) -> torch.Tensor:
        """Assembled NTP x NTP matrix, for small instances."""
        omega, phi = fusion_matrices(idx, P=self.n_covariates)
        gram = torch.block_diag(*self.gram.reshape(-1, self.n_covariates, self.n_covariates))
        return gram + self.psi * omega.T @ omega + self.phi * phi.T @ phi


def conjugate_gradient(
    system: FusedSystem,
    b: torch.Tensor,
    x0: torch.Tensor = None,
    tol: float = 1e-10,
    max_iter: int = 1000,
) -> tuple[torch.Tensor, float, int]:
    """Block-Jacobi preconditioned conjugate gradient on a FusedSystem.

    Stops once ||b - A x|| <= tol ||b||.

    Returns
    -------
    The solution, its relative residual and the number of iterations.

    """
    b_norm = float(torch.linalg.vector_norm(b))
    if b_norm == 0:
        return torch.zeros_like(b), 0.0, 0

    x = torch.zeros_like(b) if x0 is None else x0.clone()
    r = b - system.matvec(x) if x0 is not None else b.clone()
    z = system.precondition(r)
    p = z.clone()
    rz = torch.sum(r * z)

    residual = float(torch.linalg.vector_norm(r)) / b_norm
    if residual <= tol:
        return x, residual, 0

    for n_iter in range(1, max_iter + 1):
        Ap = system.matvec(p)
        alpha = rz / torch.sum(p * Ap)
        x.add_(alpha * p)
        r.sub_(alpha * Ap)

        residual = float(torch.linalg.vector_norm(r)) / b_norm
        if residual <= tol:
            return x, residual, n_iter

        z = system.precondition(r)
        rz_new = torch.sum(r * z)
        p = z + (rz_new / rz) * p
        rz = rz_new

    raise SolverError(
        f"Conjugate gradient did not reach relative residual {tol:.1e} in {max_iter} iterations (final residual {residual:.3e}).",
        residual=residual,
        iterations=max_iter,
    )


def solve_system(
    system: FusedSystem,
    b: torch.Tensor,
    config: AdmmConfig,
    idx: FusionIndex = None,
    x0: torch.Tensor = None,
) -> torch.Tensor:
    """Solve system x = b with the linear solver selected in the configuration."""
    if config.linear_solver == "krylov":
        x, _, _ = conjugate_gradient(
            system, b, x0=x0, tol=config.krylov_tol, max_iter=config.krylov_max_iter
        )
        return x

    if idx is None:
        raise ValueError("The dense solver needs the fusion index.")

    matrix = system.dense(idx)
    if config.ridge_epsilon:
        matrix = matrix + config.ridge_epsilon * torch.eye(
            matrix.shape[0], dtype=matrix.dtype
        )

    factor, info = torch.linalg.cholesky_ex(matrix)
    if int(info) != 0:
        raise SolverError(
            "The assembled normal system is singular, set ridge_epsilon to regularize it."
        )
    return torch.cholesky_solve(b.reshape(-1, 1), factor).reshape(b.shape)
