from dataclasses import dataclass

import torch

__all__ = ["PanelData", "build_design", "check_coefficients"]


@dataclass(frozen=True)
class PanelData:
    """Balanced panel of outcomes y_it and regressors z_it on an N x T lattice.

    Parameters
    ----------
    outcomes
        Tensor of shape (N, T) holding y_it.
    regressors
        Tensor of shape (N, T, P - 1) holding z_it. An intercept-only panel carries a
        trailing dimension of size 0.
    individuals
        Original labels of the individuals, in lattice order. Defaults to 1..N.
    periods
        Original labels of the periods, in lattice order. Defaults to 1..T.

    Examples
    --------
    >>> from panel_fusion import panel
    >>> import torch

    >>> data = panel.PanelData(
    ...     outcomes=torch.zeros(3, 4),
    ...     regressors=torch.ones(3, 4, 2),
    ... )

    >>> data.n_individuals, data.n_periods, data.n_covariates
    (3, 4, 3)

    >>> data.outcomes.dtype
    torch.float64

    >>> data.periods
    (1, 2, 3, 4)

    """

    outcomes: torch.Tensor
    regressors: torch.Tensor
    individuals: tuple = None
    periods: tuple = None

    def __post_init__(self) -> None:
        outcomes = torch.as_tensor(self.outcomes, dtype=torch.float64)
        regressors = torch.as_tensor(self.regressors, dtype=torch.float64)

        if outcomes.ndim != 2:
            raise ValueError("outcomes must be a (N, T) tensor.")

        n_individuals, n_periods = outcomes.shape

        if regressors.ndim == 2 and regressors.numel() == 0:
            regressors = regressors.reshape(n_individuals, n_periods, 0)

        if regressors.ndim != 3 or tuple(regressors.shape[:2]) != (
            n_individuals,
            n_periods,
        ):
            raise ValueError(
                f"regressors must be a ({n_individuals}, {n_periods}, P - 1) tensor, got {tuple(regressors.shape)}."
            )

        if n_individuals < 2 or n_periods < 2:
            raise ValueError(
                f"A panel needs N >= 2 and T >= 2, got N={n_individuals}, T={n_periods}."
            )

        if not torch.isfinite(outcomes).all() or not torch.isfinite(regressors).all():
            raise ValueError("Panel entries must be finite.")

        individuals = (
            tuple(range(1, n_individuals + 1))
            if self.individuals is None
            else tuple(self.individuals)
        )
        periods = (
            tuple(range(1, n_periods + 1)) if self.periods is None else tuple(self.periods)
        )

        if len(individuals) != n_individuals or len(periods) != n_periods:
            raise ValueError("Labels must match the lattice dimensions.")

        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "regressors", regressors)
        object.__setattr__(self, "individuals", individuals)
        object.__setattr__(self, "periods", periods)

    @property
    def n_individuals(self) -> int:
        return self.outcomes.shape[0]

    @property
    def n_periods(self) -> int:
        return self.outcomes.shape[1]

    @property
    def n_covariates(self) -> int:
        """Number of coefficients per cell, intercept included."""
        return self.regressors.shape[2] + 1

    @property
    def n_observations(self) -> int:
        return self.n_individuals * self.n_periods


def build_design(panel: PanelData) -> torch.Tensor:
    """Prepend the intercept to every regressor vector: x_it = (1, z_it).

    Parameters
    ----------
    panel
        Panel data.

    Examples
    --------
    >>> from panel_fusion import panel
    >>> import torch

    >>> regressors = torch.zeros(2, 2, 1)
    >>> regressors[0, 0, 0] = 3.5

    >>> data = panel.PanelData(outcomes=torch.zeros(2, 2), regressors=regressors)
    >>> design = panel.build_design(data)

    >>> design.shape
    torch.Size([2, 2, 2])

    >>> design[0, 0]
    tensor([1.0000, 3.5000], dtype=torch.float64)

    >>> design[1, 1]
    tensor([1., 0.], dtype=torch.float64)

    >>> intercept_only = panel.PanelData(outcomes=torch.zeros(2, 3), regressors=torch.zeros(2, 3, 0))
    >>> panel.build_design(intercept_only).unique()
    tensor([1.], dtype=torch.float64)

    """
    ones = torch.ones(
        panel.n_individuals, panel.n_periods, 1, dtype=torch.float64
    )
    return torch.cat([ones, panel.regressors], dim=-1)


def check_coefficients(beta: torch.Tensor, panel: PanelData) -> torch.Tensor:
    """Validate a coefficient field against its panel and return it as float64."""
    beta = torch.as_tensor(beta, dtype=torch.float64)
    expected = (panel.n_individuals, panel.n_periods, panel.n_covariates)
    if tuple(beta.shape) != expected:
        raise ValueError(
            f"Coefficient field must have shape {expected}, got {tuple(beta.shape)}."
        )
    if not torch.isfinite(beta).all():
        raise ValueError("Coefficient field must be finite.")
    return beta
