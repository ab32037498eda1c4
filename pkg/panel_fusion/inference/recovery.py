import numpy as np
import torch
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ..panel import BlockPartition, FusionIndex
from ..solver import FusedState

__all__ = ["block_separation", "recover_blocks"]


def recover_blocks(
    state: FusedState, idx: FusionIndex, tol_fuse: float = 1e-6
) -> BlockPartition:
    """Blocks as connected components of the graph of fused pairs.

    Two cells are linked whenever the fused auxiliary of their pair, rho for individual pairs
    or delta for period pairs, has norm at most `tol_fuse`. Block values are the means of the
    fitted coefficients over each component.

    Parameters
    ----------
    state
        Converged ADMM iterate.
    idx
        Fusion index of the lattice.
    tol_fuse
        Norm below which a pair is considered fused.

    Examples
    --------
    >>> from panel_fusion import inference, panel, solver
    >>> import torch

    >>> idx = panel.build_fusion_index(2, 2)
    >>> beta = torch.tensor([[[1.0], [4.0]], [[1.0], [1.0]]], dtype=torch.float64)
    >>> state = solver.initial_state(beta, idx)

    Individual pair (1, 2, t=1) and period pair (i=2, 1, 2) are fused, nothing else.

    >>> state = solver.FusedState(
    ...     beta=beta,
    ...     rho=torch.tensor([[0.0], [3.0]], dtype=torch.float64),
    ...     delta=torch.tensor([[-3.0], [0.0]], dtype=torch.float64),
    ...     nu=state.nu,
    ...     upsilon=state.upsilon,
    ... )

    >>> partition = inference.recover_blocks(state, idx)
    >>> partition.n_blocks
    2

    >>> partition.assignment
    tensor([[1, 2],
            [1, 1]])

    >>> partition.cells(1)
    [(1, 1), (2, 1), (2, 2)]

    >>> fused = solver.FusedState(
    ...     beta=beta,
    ...     rho=torch.zeros(2, 1, dtype=torch.float64),
    ...     delta=torch.zeros(2, 1, dtype=torch.float64),
    ...     nu=state.nu,
    ...     upsilon=state.upsilon,
    ... )
    >>> inference.recover_blocks(fused, idx).n_blocks
    1

    """
    n_individuals, n_periods = idx.n_individuals, idx.n_periods

    def cell(i: torch.Tensor, t: torch.Tensor) -> np.ndarray:
        return (i * n_periods + t).numpy()

    i, j, t = idx.individual_pairs.unbind(dim=1)
    k, s, u = idx.period_pairs.unbind(dim=1)

    individual = (torch.linalg.vector_norm(state.rho, dim=-1) <= tol_fuse).numpy()
    period = (torch.linalg.vector_norm(state.delta, dim=-1) <= tol_fuse).numpy()

    rows = np.concatenate([cell(i, t)[individual], cell(k, s)[period]])
    cols = np.concatenate([cell(j, t)[individual], cell(k, u)[period]])

    n_cells = n_individuals * n_periods
    graph = coo_matrix(
        (np.ones(rows.shape[0]), (rows, cols)), shape=(n_cells, n_cells)
    ).tocsr()

    _, labels = connected_components(csgraph=graph, directed=False)

    return BlockPartition.from_labels(
        torch.from_numpy(labels).reshape(n_individuals, n_periods),
        beta=state.beta,
    )


def block_separation(partition: BlockPartition, idx: FusionIndex) -> float:
    """Smallest coefficient gap between two blocks that meet along a fused pair.

    Returns `inf` for a single block.

    Examples
    --------
    >>> from panel_fusion import inference, panel
    >>> import torch

    >>> partition = panel.BlockPartition(
    ...     assignment=torch.tensor([[1, 1], [2, 2]]),
    ...     block_values=torch.tensor([[0.0, 0.0], [3.0, 4.0]]),
    ... )
    >>> inference.block_separation(partition, panel.build_fusion_index(2, 2))
    5.0

    """
    values = partition.expand()
    i, j, t = idx.individual_pairs.unbind(dim=1)
    k, s, u = idx.period_pairs.unbind(dim=1)
    labels = partition.assignment

    gaps = torch.cat(
        [
            torch.linalg.vector_norm(values[i, t] - values[j, t], dim=-1)[
                labels[i, t] != labels[j, t]
            ],
            torch.linalg.vector_norm(values[k, s] - values[k, u], dim=-1)[
                labels[k, s] != labels[k, u]
            ],
        ]
    )
    return float(gaps.min()) if gaps.numel() else float("inf")
