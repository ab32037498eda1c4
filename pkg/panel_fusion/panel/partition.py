from dataclasses import dataclass

import torch

__all__ = ["BlockPartition"]


@dataclass(frozen=True)
class BlockPartition:
    """Assignment of every (i, t) cell to one of L blocks sharing a coefficient vector.

    Parameters
    ----------
    assignment
        Long tensor of shape (N, T) with labels in 1..L.
    block_values
        Tensor of shape (L, P), row l - 1 holds the coefficients of block l.

    Examples
    --------
    >>> from panel_fusion import panel
    >>> import torch

    >>> labels = torch.tensor([[7, 7], [3, 7]])
    >>> beta = torch.tensor([[[1.0], [1.0]], [[5.0], [1.0]]])

    >>> partition = panel.BlockPartition.from_labels(labels, beta=beta)
    >>> partition.assignment
    tensor([[1, 1],
            [2, 1]])

    >>> partition.block_values
    tensor([[1.],
            [5.]], dtype=torch.float64)

    >>> partition.sizes()
    tensor([3, 1])

    >>> partition.expand().squeeze(-1)
    tensor([[1., 1.],
            [5., 1.]], dtype=torch.float64)

    """

    assignment: torch.Tensor
    block_values: torch.Tensor

    def __post_init__(self) -> None:
        assignment = torch.as_tensor(self.assignment, dtype=torch.long)
        block_values = torch.as_tensor(self.block_values, dtype=torch.float64)

        if assignment.ndim != 2:
            raise ValueError("assignment must be a (N, T) tensor.")
        if block_values.ndim != 2:
            raise ValueError("block_values must be a (L, P) tensor.")

        n_blocks = block_values.shape[0]
        present = torch.unique(assignment)
        if present.tolist() != list(range(1, n_blocks + 1)):
            raise ValueError(
                f"Block labels must be exactly 1..{n_blocks}, got {present.tolist()}."
            )
        if not torch.isfinite(block_values).all():
            raise ValueError("Block values must be finite.")

        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "block_values", block_values)

    @property
    def n_blocks(self) -> int:
        return self.block_values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.assignment.shape)

    def sizes(self) -> torch.Tensor:
        """Number of cells of each block."""
        return torch.bincount(self.assignment.flatten() - 1, minlength=self.n_blocks)

    def expand(self) -> torch.Tensor:
        """Coefficient field of shape (N, T, P) where every cell holds its block value."""
        return self.block_values[self.assignment - 1]

    def cells(self, block: int) -> list[tuple[int, int]]:
        """1-based cells of a 1-based block."""
        return [
            (i + 1, t + 1)
            for i, t in torch.nonzero(self.assignment == block).tolist()
        ]

    @classmethod
    def from_labels(
        cls,
        labels: torch.Tensor,
        beta: torch.Tensor = None,
        block_values: torch.Tensor = None,
    ) -> "BlockPartition":
        """Canonical partition from arbitrary integer labels.

        Blocks are numbered by their smallest cell in row-major order. Block values are the
        means of `beta` over each block, or `block_values` indexed by the original labels
        sorted ascending.

        """
        labels = torch.as_tensor(labels, dtype=torch.long)
        flat = labels.flatten()
        uniques, inverse = torch.unique(flat, return_inverse=True)

        first = torch.full((uniques.shape[0],), flat.shape[0], dtype=torch.long)
        first = first.scatter_reduce(
            0, inverse, torch.arange(flat.shape[0]), reduce="amin"
        )
        order = torch.argsort(first)
        rank = torch.empty_like(order)
        rank[order] = torch.arange(order.shape[0])
        assignment = (rank[inverse] + 1).reshape(labels.shape)

        if beta is not None:
            beta = torch.as_tensor(beta, dtype=torch.float64)
            flat_beta = beta.reshape(flat.shape[0], -1)
            sums = flat_beta.new_zeros(uniques.shape[0], flat_beta.shape[1])
            sums.index_add_(0, rank[inverse], flat_beta)
            counts = torch.bincount(rank[inverse], minlength=uniques.shape[0])
            values = sums / counts.unsqueeze(-1)
        elif block_values is not None:
            values = torch.as_tensor(block_values, dtype=torch.float64)[order]
        else:
            raise ValueError("Provide either beta or block_values.")

        return cls(assignment=assignment, block_values=values)
