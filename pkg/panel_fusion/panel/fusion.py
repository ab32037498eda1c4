from dataclasses import dataclass

import torch

__all__ = [
    "FusionIndex",
    "build_fusion_index",
    "fused_differences",
    "fusion_matrices",
    "scatter_individual",
    "scatter_period",
]


@dataclass(frozen=True)
class FusionIndex:
    """Index sets of every pairwise difference penalized by the fused objective.

    Rows are stored 0-based as long tensors of shape (K, 3). The `individual_pairs` rows are
    (i, j, t) with i < j, the `period_pairs` rows are (i, t, t') with t < t'. Both are sorted
    lexicographically. The 1-based view used in reports is given by `as_tuples`.

    """

    n_individuals: int
    n_periods: int
    individual_pairs: torch.Tensor
    period_pairs: torch.Tensor

    @property
    def n_individual_pairs(self) -> int:
        return self.individual_pairs.shape[0]

    @property
    def n_period_pairs(self) -> int:
        return self.period_pairs.shape[0]

    def as_tuples(self) -> tuple[list[tuple], list[tuple]]:
        """1-based (individual pairs, period pairs)."""
        return (
            [tuple(row) for row in (self.individual_pairs + 1).tolist()],
            [tuple(row) for row in (self.period_pairs + 1).tolist()],
        )


def _pairs(n: int) -> torch.Tensor:
    return torch.combinations(torch.arange(n), r=2)


def build_fusion_index(N: int, T: int) -> FusionIndex:
    """Enumerate the individual pairs (i, j, t) and period pairs (i, t, t').

    Parameters
    ----------
    N
        Number of individuals.
    T
        Number of periods.

    Examples
    --------
    >>> from panel_fusion import panel

    >>> idx = panel.build_fusion_index(N=2, T=2)
    >>> individual_pairs, period_pairs = idx.as_tuples()

    >>> individual_pairs
    [(1, 2, 1), (1, 2, 2)]

    >>> period_pairs
    [(1, 1, 2), (2, 1, 2)]

    >>> idx = panel.build_fusion_index(N=3, T=2)
    >>> idx.n_individual_pairs, idx.n_period_pairs
    (6, 3)

    >>> idx = panel.build_fusion_index(N=20, T=20)
    >>> idx.n_individual_pairs, idx.n_period_pairs
    (3800, 3800)

    """
    if N < 2 or T < 2:
        raise ValueError(f"Fusion requires N >= 2 and T >= 2, got N={N}, T={T}.")

    individuals = _pairs(N)
    periods = _pairs(T)

    # (i, j) major, t minor.
    individual_pairs = torch.cat(
        [
            individuals.repeat_interleave(T, dim=0),
            torch.arange(T).repeat(individuals.shape[0]).unsqueeze(-1),
        ],
        dim=1,
    )

    # i major, (t, t') minor.
    period_pairs = torch.cat(
        [
            torch.arange(N).repeat_interleave(periods.shape[0]).unsqueeze(-1),
            periods.repeat(N, 1),
        ],
        dim=1,
    )

    return FusionIndex(
        n_individuals=N,
        n_periods=T,
        individual_pairs=individual_pairs,
        period_pairs=period_pairs,
    )


def fused_differences(
    beta: torch.Tensor, idx: FusionIndex
) -> tuple[torch.Tensor, torch.Tensor]:
    """Pairwise differences beta_it - beta_jt and beta_it - beta_it'.

    Parameters
    ----------
    beta
        Coefficient field of shape (N, T, P).
    idx
        Fusion index of the lattice.

    Examples
    --------
    >>> from panel_fusion import panel
    >>> import torch

    >>> idx = panel.build_fusion_index(N=2, T=2)
    >>> beta = torch.zeros(2, 2, 2, dtype=torch.float64)
    >>> beta[0, 0] = torch.tensor([1.0, 0.0])
    >>> beta[1, 0] = torch.tensor([0.0, 1.0])

    >>> individual, period = panel.fused_differences(beta, idx)
    >>> individual[0]
    tensor([ 1., -1.], dtype=torch.float64)

    >>> individual.shape, period.shape
    (torch.Size([2, 2]), torch.Size([2, 2]))

    >>> individual, period = panel.fused_differences(torch.full((3, 3, 2), 7.0), panel.build_fusion_index(3, 3))
    >>> bool(individual.abs().max() == 0), bool(period.abs().max() == 0)
    (True, True)

    """
    i, j, t = idx.individual_pairs.unbind(dim=1)
    k, s, u = idx.period_pairs.unbind(dim=1)
    return beta[i, t] - beta[j, t], beta[k, s] - beta[k, u]


def scatter_individual(values: torch.Tensor, idx: FusionIndex) -> torch.Tensor:
    """Adjoint of the individual differences: accumulate +v on (i, t) and -v on (j, t)."""
    i, j, t = idx.individual_pairs.unbind(dim=1)
    out = values.new_zeros(idx.n_individuals, idx.n_periods, values.shape[-1])
    out.index_put_((i, t), values, accumulate=True)
    out.index_put_((j, t), -values, accumulate=True)
    return out


def scatter_period(values: torch.Tensor, idx: FusionIndex) -> torch.Tensor:
    """Adjoint of the period differences: accumulate +v on (i, t) and -v on (i, t')."""
    k, s, u = idx.period_pairs.unbind(dim=1)
    out = values.new_zeros(idx.n_individuals, idx.n_periods, values.shape[-1])
    out.index_put_((k, s), values, accumulate=True)
    out.index_put_((k, u), -values, accumulate=True)
    return out


def fusion_matrices(idx: FusionIndex, P: int) -> tuple[torch.Tensor, torch.Tensor]:
    """Dense fusion matrices acting on the row-major flattening of a (N, T, P) field.

    Only meant for small instances: the individual matrix has T N (N - 1) / 2 P rows.

    Examples
    --------
    >>> from panel_fusion import panel
    >>> import torch

    >>> idx = panel.build_fusion_index(N=3, T=2)
    >>> omega, phi = panel.fusion_matrices(idx, P=2)
    >>> omega.shape, phi.shape
    (torch.Size([12, 12]), torch.Size([6, 12]))

    >>> beta = torch.randn(3, 2, 2, dtype=torch.float64)
    >>> individual, period = panel.fused_differences(beta, idx)
    >>> torch.allclose(omega @ beta.flatten(), individual.flatten())
    True

    """
    n_cells = idx.n_individuals * idx.n_periods
    rows = torch.arange(idx.n_individual_pairs)
    i, j, t = idx.individual_pairs.unbind(dim=1)
    individual = torch.zeros(idx.n_individual_pairs, n_cells, dtype=torch.float64)
    individual[rows, i * idx.n_periods + t] = 1.0
    individual[rows, j * idx.n_periods + t] = -1.0

    rows = torch.arange(idx.n_period_pairs)
    k, s, u = idx.period_pairs.unbind(dim=1)
    period = torch.zeros(idx.n_period_pairs, n_cells, dtype=torch.float64)
    period[rows, k * idx.n_periods + s] = 1.0
    period[rows, k * idx.n_periods + u] = -1.0

    eye = torch.eye(P, dtype=torch.float64)
    return torch.kron(individual, eye), torch.kron(period, eye)
