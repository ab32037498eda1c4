import itertools

import pytest
import torch

from panel_fusion import panel


@pytest.mark.parametrize("N, T", list(itertools.product(range(2, 11), repeat=2)))
def test_fusion_index_counts(N, T):
    idx = panel.build_fusion_index(N, T)
    assert idx.n_individual_pairs == T * N * (N - 1) // 2
    assert idx.n_period_pairs == N * T * (T - 1) // 2


def test_fusion_index_is_lexicographic():
    individual, period = panel.build_fusion_index(3, 3).as_tuples()
    assert individual == sorted(individual)
    assert period == sorted(period)
    assert individual[0] == (1, 2, 1)
    assert period[-1] == (3, 2, 3)


def test_fused_differences_match_brute_force():
    generator = torch.Generator().manual_seed(3)
    N, T, P = 4, 3, 2
    beta = torch.randn(N, T, P, generator=generator, dtype=torch.float64)
    idx = panel.build_fusion_index(N, T)
    individual, period = panel.fused_differences(beta, idx)
    individual_pairs, period_pairs = idx.as_tuples()

    for row, (i, j, t) in enumerate(individual_pairs):
        assert torch.equal(individual[row], beta[i - 1, t - 1] - beta[j - 1, t - 1])
        assert torch.equal(-individual[row], beta[j - 1, t - 1] - beta[i - 1, t - 1])
    for row, (i, t, s) in enumerate(period_pairs):
        assert torch.equal(period[row], beta[i - 1, t - 1] - beta[i - 1, s - 1])


def test_scatter_is_adjoint_of_differences():
    generator = torch.Generator().manual_seed(5)
    N, T, P = 3, 4, 2
    idx = panel.build_fusion_index(N, T)
    beta = torch.randn(N, T, P, generator=generator, dtype=torch.float64)
    v = torch.randn(idx.n_individual_pairs, P, generator=generator, dtype=torch.float64)
    w = torch.randn(idx.n_period_pairs, P, generator=generator, dtype=torch.float64)

    individual, period = panel.fused_differences(beta, idx)
    assert torch.isclose(torch.sum(individual * v), torch.sum(beta * panel.scatter_individual(v, idx)))
    assert torch.isclose(torch.sum(period * w), torch.sum(beta * panel.scatter_period(w, idx)))

    omega, phi = panel.fusion_matrices(idx, P)
    assert torch.allclose(omega.T @ v.flatten(), panel.scatter_individual(v, idx).flatten())
    assert torch.allclose(phi.T @ w.flatten(), panel.scatter_period(w, idx).flatten())


def test_panel_rejects_bad_shapes():
    with pytest.raises(ValueError):
        panel.PanelData(outcomes=torch.zeros(1, 4), regressors=torch.zeros(1, 4, 1))
    with pytest.raises(ValueError):
        panel.PanelData(outcomes=torch.zeros(3, 4), regressors=torch.zeros(3, 5, 1))
    with pytest.raises(ValueError):
        panel.PanelData(outcomes=torch.full((2, 2), float("nan")), regressors=torch.zeros(2, 2, 0))


def test_partition_from_labels_is_canonical():
    labels = torch.tensor([[5, 5, 9], [2, 9, 9]])
    partition = panel.BlockPartition.from_labels(labels, block_values=[[0.0], [1.0], [2.0]])
    assert partition.assignment.tolist() == [[1, 1, 2], [3, 2, 2]]
    # block values follow the sorted original labels 2, 5, 9
    assert partition.block_values.squeeze(-1).tolist() == [1.0, 2.0, 0.0]
    assert partition.cells(3) == [(2, 1)]
