from dataclasses import dataclass

import torch
from scipy import stats

from .post import PostEstimate

__all__ = [
    "HypothesisSpec",
    "chi_square_test",
    "confidence_region_contains",
    "difference_contrast",
]


@dataclass(frozen=True)
class HypothesisSpec:
    """Linear hypothesis on the stacked block coefficients: contrast @ alpha.

    Parameters
    ----------
    contrast
        Matrix of shape (q, L P) with full row rank q. Columns follow the row-major
        flattening of alpha, block by block.

    Examples
    --------
    >>> from panel_fusion import inference

    >>> inference.HypothesisSpec(contrast=[[1.0, 0.0], [2.0, 0.0]])
    Traceback (most recent call last):
    ...
    ValueError: The contrast must have full row rank 2, got rank 1.

    """

    contrast: torch.Tensor

    def __post_init__(self) -> None:
        contrast = torch.as_tensor(self.contrast, dtype=torch.float64)
        if contrast.ndim == 1:
            contrast = contrast.unsqueeze(0)
        if contrast.ndim != 2:
            raise ValueError("The contrast must be a (q, L P) matrix.")
        rank = int(torch.linalg.matrix_rank(contrast))
        if rank != contrast.shape[0]:
            raise ValueError(
                f"The contrast must have full row rank {contrast.shape[0]}, got rank {rank}."
            )
        object.__setattr__(self, "contrast", contrast)

    @property
    def q(self) -> int:
        return self.contrast.shape[0]


def difference_contrast(
    n_blocks: int, n_covariates: int, first: int, second: int
) -> HypothesisSpec:
    """H0: alpha_first = alpha_second, blocks 1-based.

    Examples
    --------
    >>> from panel_fusion import inference

    >>> inference.difference_contrast(n_blocks=2, n_covariates=2, first=1, second=2).contrast
    tensor([[ 1.,  0., -1.,  0.],
            [ 0.,  1.,  0., -1.]], dtype=torch.float64)

    >>> inference.difference_contrast(n_blocks=2, n_covariates=1, first=1, second=3)
    Traceback (most recent call last):
    ...
    ValueError: Blocks must be two distinct numbers in 1..2, got 1 and 3.

    """
    if first == second or not (1 <= first <= n_blocks and 1 <= second <= n_blocks):
        raise ValueError(
            f"Blocks must be two distinct numbers in 1..{n_blocks}, got {first} and {second}."
        )
    eye = torch.eye(n_covariates, dtype=torch.float64)
    contrast = torch.zeros(n_covariates, n_blocks * n_covariates, dtype=torch.float64)
    contrast[:, (first - 1) * n_covariates : first * n_covariates] = eye
    contrast[:, (second - 1) * n_covariates : second * n_covariates] -= eye
    return HypothesisSpec(contrast=contrast)


def _quadratic_form(
    estimate: PostEstimate, hypothesis: HypothesisSpec, center: torch.Tensor
) -> float:
    contrast = hypothesis.contrast
    if contrast.shape[1] != estimate.covariance.shape[0]:
        raise ValueError(
            f"The contrast has {contrast.shape[1]} columns, the estimate {estimate.covariance.shape[0]} coefficients."
        )
    gap = contrast @ estimate.alpha.reshape(-1) - center
    variance = contrast @ estimate.covariance @ contrast.T
    factor, info = torch.linalg.cholesky_ex(variance)
    if int(info) != 0:
        raise ValueError("The variance of the contrast is singular.")
    return float(gap @ torch.cholesky_solve(gap.unsqueeze(-1), factor).squeeze(-1))


def chi_square_test(
    estimate: PostEstimate, hypothesis: HypothesisSpec
) -> tuple[float, int, float]:
    """Wald chi-square test of H0: contrast @ alpha = 0.

    Returns
    -------
    The statistic, its degrees of freedom q and the upper-tail p-value.

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

    >>> statistic, dof, p_value = inference.chi_square_test(estimate, inference.HypothesisSpec(contrast=[[1.0]]))
    >>> round(statistic, 6), dof
    (7.714286, 1)

    >>> round(p_value, 3)
    0.005

    """
    statistic = _quadratic_form(
        estimate, hypothesis, torch.zeros(hypothesis.q, dtype=torch.float64)
    )
    return statistic, hypothesis.q, float(stats.chi2.sf(statistic, hypothesis.q))


def confidence_region_contains(
    estimate: PostEstimate,
    hypothesis: HypothesisSpec,
    iota: torch.Tensor,
    tau: float = 0.05,
) -> bool:
    """Whether iota lies in the 100 (1 - tau) % confidence region of contrast @ alpha.

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
    >>> hypothesis = inference.HypothesisSpec(contrast=[[1.0]])

    >>> inference.confidence_region_contains(estimate, hypothesis, iota=[3.0], tau=0.05)
    True

    >>> inference.confidence_region_contains(estimate, hypothesis, iota=[0.0], tau=0.05)
    False

    """
    if not 0 < tau < 1:
        raise ValueError(f"tau must lie in (0, 1), got {tau}.")
    iota = torch.as_tensor(iota, dtype=torch.float64).reshape(-1)
    if iota.shape[0] != hypothesis.q:
        raise ValueError(f"iota must have {hypothesis.q} entries.")
    statistic = _quadratic_form(estimate, hypothesis, iota)
    return statistic <= float(stats.chi2.ppf(1 - tau, hypothesis.q))
