from dataclasses import dataclass

import pandas as pd
import torch
from scipy import stats

from ..panel import BlockPartition, PanelData
from ..utils.exceptions import SingularBlockError

__all__ = [
    "PostEstimate",
    "coefficient_table",
    "oracle_estimate",
    "post_estimate",
    "standard_errors",
]


@dataclass(frozen=True)
class PostEstimate:
    """Pooled least squares within each block of a partition.

    Parameters
    ----------
    partition
        Block structure the estimate is conditioned on.
    alpha
        Tensor of shape (L, P), the block coefficients.
    beta
        Coefficient field of shape (N, T, P) expanded from alpha.
    sigma_hat
        Residual standard deviation with N T - L P degrees of freedom.
    covariance
        Estimated covariance of the stacked alpha, shape (L P, L P), block diagonal.

    """

    partition: BlockPartition
    alpha: torch.Tensor
    beta: torch.Tensor
    sigma_hat: float
    covariance: torch.Tensor

    @property
    def n_blocks(self) -> int:
        return self.alpha.shape[0]

    @property
    def n_covariates(self) -> int:
        return self.alpha.shape[1]


def post_estimate(
    panel: PanelData, design: torch.Tensor, partition: BlockPartition
) -> PostEstimate:
    """Post-selection estimator: ordinary least squares pooled over each block.

    Parameters
    ----------
    panel
        Panel data.
    design
        Design tensor.
    partition
        Recovered (or true) block structure.

    Examples
    --------
    >>> from panel_fusion import inference, panel
    >>> import torch

    >>> data = panel.PanelData(
    ...     outcomes=torch.tensor([[1.0, 2.0], [3.0, 6.0]]),
    ...     regressors=torch.zeros(2, 2, 0),
    ... )
    >>> design = panel.build_design(data)
    >>> single = panel.BlockPartition(
    ...     assignment=torch.ones(2, 2, dtype=torch.long),
    ...     block_values=torch.zeros(1, 1),
    ... )

    >>> estimate = inference.post_estimate(data, design, single)
    >>> estimate.alpha
    tensor([[3.]], dtype=torch.float64)

    >>> round(estimate.sigma_hat ** 2, 6)
    4.666667

    >>> inference.post_estimate(
    ...     panel.PanelData(outcomes=torch.zeros(2, 2), regressors=torch.ones(2, 2, 1)),
    ...     panel.build_design(panel.PanelData(outcomes=torch.zeros(2, 2), regressors=torch.ones(2, 2, 1))),
    ...     panel.BlockPartition(assignment=torch.ones(2, 2, dtype=torch.long), block_values=torch.zeros(1, 2)),
    ... )
    Traceback (most recent call last):
    ...
    panel_fusion.utils.exceptions.SingularBlockError: The Gram matrix of block 1 is singular (4 cells, 2 coefficients).

    """
    n_covariates = design.shape[-1]
    n_blocks = partition.n_blocks
    n_observations = panel.n_observations

    if n_observations <= n_blocks * n_covariates:
        raise SingularBlockError(
            f"No residual degrees of freedom: N T = {n_observations} <= L P = {n_blocks * n_covariates}."
        )

    flat_design = design.reshape(-1, n_covariates)
    flat_outcomes = panel.outcomes.reshape(-1)
    labels = partition.assignment.reshape(-1)

    alpha, inverses = [], []
    for block in range(1, n_blocks + 1):
        mask = labels == block
        x, y = flat_design[mask], flat_outcomes[mask]
        gram = x.T @ x

        factor, info = torch.linalg.cholesky_ex(gram)
        if int(info) != 0 or int(torch.linalg.matrix_rank(gram)) < n_covariates:
            raise SingularBlockError(
                f"The Gram matrix of block {block} is singular ({int(mask.sum())} cells, {n_covariates} coefficients).",
                block=block,
            )

        alpha.append(torch.cholesky_solve((x.T @ y).unsqueeze(-1), factor).squeeze(-1))
        inverses.append(torch.cholesky_inverse(factor))

    alpha = torch.stack(alpha, dim=0)
    beta = alpha[partition.assignment - 1]
    residuals = panel.outcomes - torch.sum(design * beta, dim=-1)
    sigma2 = float(torch.sum(residuals**2)) / (n_observations - n_blocks * n_covariates)

    return PostEstimate(
        partition=BlockPartition(assignment=partition.assignment, block_values=alpha),
        alpha=alpha,
        beta=beta,
        sigma_hat=sigma2**0.5,
        covariance=sigma2 * torch.block_diag(*inverses),
    )


def oracle_estimate(
    panel: PanelData, design: torch.Tensor, truth: BlockPartition
) -> PostEstimate:
    """Infeasible oracle: the post estimator computed on the true block structure."""
    return post_estimate(panel, design, truth)


def standard_errors(estimate: PostEstimate) -> torch.Tensor:
    """Standard errors of alpha, shape (L, P)."""
    return torch.sqrt(torch.diagonal(estimate.covariance)).reshape(
        estimate.n_blocks, estimate.n_covariates
    )


def _stars(p_value: float) -> str:
    if p_value < 0.01:
        return "***"
    if p_value < 0.05:
        return "**"
    if p_value < 0.1:
        return "*"
    return ""


def coefficient_table(estimate: PostEstimate, names: list[str] = None) -> pd.DataFrame:
    """Regression table of the block coefficients with normal-based p-values.

    Examples
    --------
    >>> from panel_fusion import inference, panel
    >>> import torch

    >>> data = panel.PanelData(
    ...     outcomes=torch.tensor([[1.0, 2.0], [3.0, 6.0]]),
    ...     regressors=torch.zeros(2, 2, 0),
    ... )
    >>> estimate = inference.post_estimate(
    ...     data,
    ...     panel.build_design(data),
    ...     panel.BlockPartition(assignment=torch.ones(2, 2, dtype=torch.long), block_values=torch.zeros(1, 1)),
    ... )

    >>> table = inference.coefficient_table(estimate)
    >>> table[["block", "coefficient", "estimate", "stars"]]
       block coefficient  estimate stars
    0      1   intercept       3.0   ***

    """
    names = (
        ["intercept"] + [f"z{p}" for p in range(1, estimate.n_covariates)]
        if names is None
        else list(names)
    )
    errors = standard_errors(estimate)

    rows = []
    for block in range(estimate.n_blocks):
        for p, name in enumerate(names):
            value = float(estimate.alpha[block, p])
            error = float(errors[block, p])
            z = value / error if error > 0 else float("nan")
            p_value = float(2 * stats.norm.sf(abs(z)))
            rows.append(
                {
                    "block": block + 1,
                    "coefficient": name,
                    "estimate": value,
                    "std_error": error,
                    "z": z,
                    "p_value": p_value,
                    "stars": _stars(p_value),
                }
            )
    return pd.DataFrame(rows)
