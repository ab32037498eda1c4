from dataclasses import dataclass

from sklearn.metrics import rand_score

from ..panel import BlockPartition

__all__ = ["ReplicateScore", "extended_rand_index"]


@dataclass(frozen=True)
class ReplicateScore:
    """Accuracy of one replicate for one estimator."""

    rmse: float
    bias: float
    l_hat: int
    eri: float
    eri_t: float
    eri_n: float
    rmse_slope: float = None
    bias_slope: float = None


def extended_rand_index(
    est: BlockPartition, truth: BlockPartition
) -> tuple[float, float, float]:
    """Extended Rand index between two partitions of the same lattice.

    RI_t compares the clusterings of the N individuals at period t, RI_i the clusterings of
    the T periods of individual i. ERI(T) and ERI(N) average them over periods and
    individuals, ERI averages ERI(T) and ERI(N).

    Returns
    -------
    (ERI, ERI(T), ERI(N))

    Examples
    --------
    >>> from panel_fusion import metrics, panel
    >>> import torch

    >>> truth = panel.BlockPartition(
    ...     assignment=torch.tensor([[1, 1], [1, 1], [2, 2], [2, 2]]),
    ...     block_values=torch.zeros(2, 1),
    ... )
    >>> singletons = panel.BlockPartition(
    ...     assignment=torch.arange(1, 9).reshape(4, 2),
    ...     block_values=torch.zeros(8, 1),
    ... )

    >>> metrics.extended_rand_index(truth, truth)
    (1.0, 1.0, 1.0)

    >>> eri, eri_t, eri_n = metrics.extended_rand_index(singletons, truth)
    >>> round(eri_t, 4), eri_n
    (0.6667, 0.0)

    """
    if est.shape != truth.shape:
        raise ValueError(f"Partitions cover different lattices: {est.shape} and {truth.shape}.")
    n_individuals, n_periods = truth.shape
    if n_individuals < 2 or n_periods < 2:
        raise ValueError("The Rand index needs at least two items per slice.")

    estimated, true = est.assignment.numpy(), truth.assignment.numpy()

    eri_t = sum(
        rand_score(true[:, t], estimated[:, t]) for t in range(n_periods)
    ) / n_periods
    eri_n = sum(
        rand_score(true[i], estimated[i]) for i in range(n_individuals)
    ) / n_individuals

    return (float(eri_t + eri_n) / 2, float(eri_t), float(eri_n))
