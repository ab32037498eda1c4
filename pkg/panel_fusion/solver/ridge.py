import torch

from ..panel import FusionIndex, PanelData, build_fusion_index, fused_differences
from .config import AdmmConfig, RidgeConfig
from .linear import FusedSystem, solve_system

__all__ = ["ridge_init", "ridge_objective"]


def ridge_init(
    panel: PanelData,
    design: torch.Tensor,
    config: RidgeConfig = None,
    solver: AdmmConfig = None,
    idx: FusionIndex = None,
) -> torch.Tensor:
    """Ridge fusion initializer.

    Unique minimizer of 1/2 ||Y - X beta||^2 + lambda* / 2 ||Omega beta||^2
    + gamma* / 2 ||Phi beta||^2, obtained with the same structured solver as the ADMM beta
    update.

    Parameters
    ----------
    panel
        Panel data.
    design
        Design tensor.
    config
        Ridge penalty levels, 0.001 for both by default.
    solver
        Linear solver settings, only the `linear_solver`, Krylov and ridge_epsilon fields
        are used.
    idx
        Fusion index, required by the dense solver.

    Examples
    --------
    >>> from panel_fusion import panel, solver
    >>> import torch

    >>> _ = torch.manual_seed(42)

    >>> data = panel.PanelData(outcomes=torch.randn(3, 3), regressors=torch.zeros(3, 3, 0))
    >>> design = panel.build_design(data)

    >>> beta = solver.ridge_init(data, design, solver.RidgeConfig(lambda_star=1e-9, gamma_star=1e-9))
    >>> torch.allclose(beta.squeeze(-1), data.outcomes, atol=1e-6)
    True

    >>> beta = solver.ridge_init(
    ...     data,
    ...     design,
    ...     solver.RidgeConfig(lambda_star=1e6, gamma_star=1e6),
    ...     solver.AdmmConfig(linear_solver="dense"),
    ... )
    >>> abs(float(beta.mean()) - float(data.outcomes.mean())) < 1e-3
    True

    """
    config = RidgeConfig() if config is None else config
    solver = AdmmConfig() if solver is None else solver
    if idx is None and solver.linear_solver == "dense":
        idx = build_fusion_index(panel.n_individuals, panel.n_periods)

    system = FusedSystem(design, psi=config.lambda_star, phi=config.gamma_star)
    rhs = design * panel.outcomes.unsqueeze(-1)
    return solve_system(system, rhs, config=solver, idx=idx)


def ridge_objective(
    panel: PanelData,
    design: torch.Tensor,
    beta: torch.Tensor,
    config: RidgeConfig = None,
    idx: FusionIndex = None,
) -> float:
    """Value of the ridge fusion criterion at beta."""
    config = RidgeConfig() if config is None else config
    idx = build_fusion_index(panel.n_individuals, panel.n_periods) if idx is None else idx
    beta = torch.as_tensor(beta, dtype=torch.float64)
    individual, period = fused_differences(beta, idx)
    fitted = torch.sum(design * beta, dim=-1)
    return float(
        0.5 * torch.sum((panel.outcomes - fitted) ** 2)
        + 0.5 * config.lambda_star * torch.sum(individual**2)
        + 0.5 * config.gamma_star * torch.sum(period**2)
    )
