import time
from dataclasses import dataclass, field, replace

import torch

from .. import penalty, utils
from ..panel import (
    FusionIndex,
    PanelData,
    build_fusion_index,
    check_coefficients,
    fused_differences,
    scatter_individual,
    scatter_period,
)
from ..penalty import PenaltySpec
from ..utils.exceptions import SolverError
from .config import AdmmConfig
from .linear import FusedSystem, solve_system

__all__ = [
    "FitResult",
    "FusedState",
    "initial_state",
    "objective_value",
    "run_admm",
    "solve_beta",
    "sum_squared_errors",
    "update_duals",
    "update_fused",
]


@dataclass(frozen=True)
class FusedState:
    """ADMM iterate: coefficients, fused auxiliaries rho / delta and their duals nu / upsilon.

    `rho`, `nu` have one row per individual pair and `delta`, `upsilon` one row per period
    pair, rows ordered as in the FusionIndex.

    """

    beta: torch.Tensor
    rho: torch.Tensor
    delta: torch.Tensor
    nu: torch.Tensor
    upsilon: torch.Tensor
    iteration: int = 0
    primal_residual: float = 0.0


@dataclass(frozen=True)
class FitResult:
    """Converged ADMM estimate for one (lambda, gamma) pair."""

    state: FusedState
    converged: bool
    lambda_: float
    gamma: float
    objective: float
    sse: float
    change: float = 0.0
    elapsed: float = 0.0
    objective_trace: tuple = field(default=(), repr=False)

    @property
    def beta(self) -> torch.Tensor:
        return self.state.beta

    @property
    def iterations(self) -> int:
        return self.state.iteration

    def diagnostics(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "primal_residual": self.state.primal_residual,
            "change": self.change,
            "elapsed": self.elapsed,
        }


def initial_state(beta: torch.Tensor, idx: FusionIndex) -> FusedState:
    """Auxiliaries set to the fused differences of beta and zero duals."""
    rho, delta = fused_differences(beta, idx)
    return FusedState(
        beta=beta,
        rho=rho,
        delta=delta,
        nu=torch.zeros_like(rho),
        upsilon=torch.zeros_like(delta),
    )


def update_fused(
    state: FusedState,
    lambda_spec: PenaltySpec,
    gamma_spec: PenaltySpec,
    config: AdmmConfig,
    idx: FusionIndex,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Proximal update of rho and delta.

    Parameters
    ----------
    state
        Current iterate.
    lambda_spec
        Penalty on the individual differences.
    gamma_spec
        Penalty on the period differences.
    config
        ADMM settings, psi and phi are the proximal steps.
    idx
        Fusion index.

    Examples
    --------
    >>> from panel_fusion import panel, penalty, solver
    >>> import torch

    >>> idx = panel.build_fusion_index(2, 2)
    >>> beta = torch.zeros(2, 2, 2, dtype=torch.float64)
    >>> beta[0, 0] = torch.tensor([2.0, 0.0])
    >>> state = solver.initial_state(beta, idx)

    >>> rho, delta = solver.update_fused(
    ...     state,
    ...     lambda_spec=penalty.PenaltySpec(kind="mcp", level=1.0, concavity=3.0),
    ...     gamma_spec=penalty.PenaltySpec(kind="mcp", level=0.0, concavity=3.0),
    ...     config=solver.AdmmConfig(),
    ...     idx=idx,
    ... )

    >>> rho
    tensor([[1.5000, 0.0000],
            [0.0000, 0.0000]], dtype=torch.float64)

    >>> delta
    tensor([[2., 0.],
            [0., 0.]], dtype=torch.float64)

    """
    individual, period = fused_differences(state.beta, idx)
    xi = individual + state.nu / config.psi
    vartheta = period + state.upsilon / config.phi
    return (
        penalty.prox(xi, spec=lambda_spec, step=config.psi),
        penalty.prox(vartheta, spec=gamma_spec, step=config.phi),
    )


def update_duals(
    state: FusedState,
    rho: torch.Tensor,
    delta: torch.Tensor,
    config: AdmmConfig,
    idx: FusionIndex,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Dual ascent on the fusion constraints, evaluated at the current beta.

    Examples
    --------
    >>> from panel_fusion import panel, solver
    >>> import torch

    >>> idx = panel.build_fusion_index(2, 2)
    >>> beta = torch.zeros(2, 2, 2, dtype=torch.float64)
    >>> beta[0, 0] = torch.tensor([1.0, 0.0])
    >>> state = solver.initial_state(beta, idx)

    >>> nu, upsilon = solver.update_duals(
    ...     state,
    ...     rho=torch.zeros_like(state.rho),
    ...     delta=state.delta,
    ...     config=solver.AdmmConfig(psi=2.0),
    ...     idx=idx,
    ... )

    >>> nu[0]
    tensor([2., 0.], dtype=torch.float64)

    >>> float(upsilon.abs().max())
    0.0

    """
    individual, period = fused_differences(state.beta, idx)
    return (
        state.nu + config.psi * (individual - rho),
        state.upsilon + config.phi * (period - delta),
    )


def solve_beta(
    panel: PanelData,
    design: torch.Tensor,
    state: FusedState,
    config: AdmmConfig,
    idx: FusionIndex,
    system: FusedSystem = None,
) -> torch.Tensor:
    """Least-squares update of beta given the fused auxiliaries and the duals.

    Solves (X^T X + psi Omega^T Omega + phi Phi^T Phi) beta
    = X^T Y + Omega^T (psi rho - nu) + Phi^T (phi delta - upsilon).

    Examples
    --------
    >>> from panel_fusion import panel, solver
    >>> import torch

    >>> _ = torch.manual_seed(42)

    >>> data = panel.PanelData(outcomes=torch.randn(3, 3), regressors=torch.zeros(3, 3, 0))
    >>> design = panel.build_design(data)
    >>> idx = panel.build_fusion_index(3, 3)
    >>> config = solver.AdmmConfig()

    >>> state = solver.initial_state(torch.zeros(3, 3, 1, dtype=torch.float64), idx)
    >>> state = solver.FusedState(
    ...     beta=state.beta,
    ...     rho=torch.randn_like(state.rho),
    ...     delta=torch.randn_like(state.delta),
    ...     nu=torch.randn_like(state.nu),
    ...     upsilon=torch.randn_like(state.upsilon),
    ... )

    >>> krylov = solver.solve_beta(data, design, state, config, idx)
    >>> dense = solver.solve_beta(data, design, state, solver.AdmmConfig(linear_solver="dense"), idx)
    >>> bool(torch.linalg.norm(krylov - dense) <= 1e-8 * torch.linalg.norm(dense))
    True

    """
    system = FusedSystem(design, psi=config.psi, phi=config.phi) if system is None else system
    rhs = (
        design * panel.outcomes.unsqueeze(-1)
        + scatter_individual(system.psi * state.rho - state.nu, idx)
        + scatter_period(system.phi * state.delta - state.upsilon, idx)
    )
    return solve_system(system, rhs, config=config, idx=idx, x0=state.beta)


def sum_squared_errors(
    panel: PanelData, design: torch.Tensor, beta: torch.Tensor
) -> float:
    fitted = torch.sum(design * beta, dim=-1)
    return float(torch.sum((panel.outcomes - fitted) ** 2))


def objective_value(
    panel: PanelData,
    design: torch.Tensor,
    beta: torch.Tensor,
    lambda_spec: PenaltySpec,
    gamma_spec: PenaltySpec,
    idx: FusionIndex = None,
) -> float:
    """Doubly penalized least squares objective.

    1/2 SSE + sum_t sum_{i<j} P_lambda(||beta_it - beta_jt||)
    + sum_i sum_{t<t'} P_gamma(||beta_it - beta_it'||).

    Examples
    --------
    >>> from panel_fusion import panel, penalty, solver
    >>> import torch

    >>> data = panel.PanelData(
    ...     outcomes=torch.tensor([[1.0, 2.0], [3.0, 5.0]]),
    ...     regressors=torch.zeros(2, 2, 0),
    ... )
    >>> design = panel.build_design(data)
    >>> lasso = penalty.PenaltySpec(kind="lasso", level=1.0)

    >>> solver.objective_value(data, design, data.outcomes.unsqueeze(-1), lasso, lasso)
    8.0

    >>> solver.objective_value(data, design, torch.zeros(2, 2, 1), lasso, lasso)
    19.5

    """
    idx = build_fusion_index(panel.n_individuals, panel.n_periods) if idx is None else idx
    beta = torch.as_tensor(beta, dtype=torch.float64)
    individual, period = fused_differences(beta, idx)
    return (
        0.5 * sum_squared_errors(panel, design, beta)
        + float(
            penalty.penalty_value(torch.linalg.vector_norm(individual, dim=-1), lambda_spec).sum()
        )
        + float(
            penalty.penalty_value(torch.linalg.vector_norm(period, dim=-1), gamma_spec).sum()
        )
    )


def _primal_residual(
    beta: torch.Tensor, rho: torch.Tensor, delta: torch.Tensor, idx: FusionIndex
) -> float:
    individual, period = fused_differences(beta, idx)
    return max(
        float(torch.linalg.vector_norm(individual - rho, dim=-1).max()),
        float(torch.linalg.vector_norm(period - delta, dim=-1).max()),
    )


def run_admm(
    panel: PanelData,
    design: torch.Tensor,
    lambda_spec: PenaltySpec,
    gamma_spec: PenaltySpec,
    config: AdmmConfig,
    init: torch.Tensor,
    idx: FusionIndex = None,
    record_objective: bool = False,
) -> FitResult:
    """Fit the doubly fused model for one (lambda, gamma) pair.

    Every iteration updates rho / delta by their proximal operators, then the duals, then
    beta. The loop stops when all constraint residuals are below `tol_primal` and beta moved
    by less than `tol_change`, or after `max_iterations`.

    Parameters
    ----------
    panel
        Panel data.
    design
        Design tensor built by `panel.build_design`.
    lambda_spec
        Penalty on the individual differences.
    gamma_spec
        Penalty on the period differences.
    config
        ADMM settings.
    init
        Starting coefficient field, usually the ridge fusion initializer.
    idx
        Fusion index, built when omitted.
    record_objective
        Keep the objective value of every iterate in `objective_trace`.

    Examples
    --------
    >>> from panel_fusion import panel, penalty, solver
    >>> import torch

    >>> _ = torch.manual_seed(42)

    >>> data = panel.PanelData(outcomes=torch.randn(3, 4), regressors=torch.zeros(3, 4, 0))
    >>> design = panel.build_design(data)

    >>> fit = solver.run_admm(
    ...     data,
    ...     design,
    ...     lambda_spec=penalty.PenaltySpec(kind="scad", level=0.0),
    ...     gamma_spec=penalty.PenaltySpec(kind="scad", level=0.0),
    ...     config=solver.AdmmConfig(tol_primal=1e-8, tol_change=1e-8),
    ...     init=torch.zeros(3, 4, 1, dtype=torch.float64),
    ... )

    >>> fit.converged
    True

    >>> torch.allclose(fit.beta.squeeze(-1), data.outcomes, atol=1e-6)
    True

    """
    start = time.time()
    idx = build_fusion_index(panel.n_individuals, panel.n_periods) if idx is None else idx
    init = check_coefficients(init, panel)
    lambda_spec.validate(step=config.psi)
    gamma_spec.validate(step=config.phi)

    system = FusedSystem(design, psi=config.psi, phi=config.phi)
    state = initial_state(init, idx)
    trace = []
    if record_objective:
        trace.append(
            objective_value(panel, design, state.beta, lambda_spec, gamma_spec, idx=idx)
        )

    converged, change = False, float("inf")
    for iteration in range(1, config.max_iterations + 1):
        rho, delta = update_fused(state, lambda_spec, gamma_spec, config, idx)
        nu, upsilon = update_duals(state, rho, delta, config, idx)
        state = replace(state, rho=rho, delta=delta, nu=nu, upsilon=upsilon)

        beta = solve_beta(panel, design, state, config, idx, system=system)
        if not torch.isfinite(beta).all():
            raise SolverError(
                f"Non-finite coefficients at ADMM iteration {iteration}.",
                iteration=iteration,
            )

        change = float((beta - state.beta).abs().max())
        residual = _primal_residual(beta, rho, delta, idx)
        state = replace(state, beta=beta, iteration=iteration, primal_residual=residual)

        if record_objective:
            trace.append(
                objective_value(panel, design, beta, lambda_spec, gamma_spec, idx=idx)
            )

        if residual <= config.tol_primal and change <= config.tol_change:
            converged = True
            break

    if not converged:
        utils.convergence_warning(
            iterations=state.iteration, residual=state.primal_residual
        )

    return FitResult(
        state=state,
        converged=converged,
        lambda_=lambda_spec.level,
        gamma=gamma_spec.level,
        objective=objective_value(
            panel, design, state.beta, lambda_spec, gamma_spec, idx=idx
        ),
        sse=sum_squared_errors(panel, design, state.beta),
        change=change,
        elapsed=time.time() - start,
        objective_trace=tuple(trace),
    )
