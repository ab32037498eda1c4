import torch

__all__ = ["percent_correct_L", "rmse_bias"]


def rmse_bias(
    beta_hat: torch.Tensor, beta_true: torch.Tensor, coefficients: list[int] = None
) -> tuple[float, float]:
    """Root mean squared error and mean signed error over all coefficients.

    Parameters
    ----------
    beta_hat
        Estimated field (N, T, P).
    beta_true
        True field (N, T, P).
    coefficients
        Restrict both measures to these coefficient slots, e.g. `[1]` for the slope.

    Examples
    --------
    >>> from panel_fusion import metrics
    >>> import torch

    >>> truth = torch.zeros(2, 1, 1)
    >>> metrics.rmse_bias(truth + 1, truth)
    (1.0, 1.0)

    >>> metrics.rmse_bias(torch.tensor([[[1.0]], [[-1.0]]]), truth)
    (1.0, 0.0)

    >>> metrics.rmse_bias(torch.ones(2, 2, 2), torch.zeros(2, 2, 3))
    Traceback (most recent call last):
    ...
    ValueError: Shapes differ: (2, 2, 2) and (2, 2, 3).

    """
    beta_hat = torch.as_tensor(beta_hat, dtype=torch.float64)
    beta_true = torch.as_tensor(beta_true, dtype=torch.float64)
    if beta_hat.shape != beta_true.shape:
        raise ValueError(
            f"Shapes differ: {tuple(beta_hat.shape)} and {tuple(beta_true.shape)}."
        )
    errors = beta_hat - beta_true
    if coefficients is not None:
        errors = errors[..., list(coefficients)]
    return float(torch.sqrt(torch.mean(errors**2))), float(torch.mean(errors))


def percent_correct_L(l_hats: list[int], L0: int) -> float:
    """Share of replicates that recovered the true number of blocks.

    Examples
    --------
    >>> from panel_fusion import metrics

    >>> metrics.percent_correct_L([2] * 89 + [3] * 11, L0=2)
    0.89

    >>> metrics.percent_correct_L([], L0=2)
    Traceback (most recent call last):
    ...
    ValueError: At least one replicate is required.

    """
    if not l_hats:
        raise ValueError("At least one replicate is required.")
    return sum(int(l_hat == L0) for l_hat in l_hats) / len(l_hats)
