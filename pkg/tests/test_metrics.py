import pytest
import torch

from panel_fusion import metrics, panel


def _partition(labels) -> panel.BlockPartition:
    return panel.BlockPartition.from_labels(torch.as_tensor(labels), block_values=torch.zeros(len(set(torch.as_tensor(labels).flatten().tolist())), 1))


def test_eri_is_invariant_to_label_permutations():
    generator = torch.Generator().manual_seed(0)
    for _ in range(20):
        truth = torch.randint(1, 4, (6, 5), generator=generator)
        estimate = torch.randint(1, 5, (6, 5), generator=generator)
        relabeled = (estimate * 7 + 3) % 31
        assert metrics.extended_rand_index(_partition(estimate), _partition(truth)) == pytest.approx(
            metrics.extended_rand_index(_partition(relabeled), _partition(truth))
        )


def test_eri_lies_in_the_unit_interval_and_averages_its_parts():
    generator = torch.Generator().manual_seed(1)
    for _ in range(20):
        truth = _partition(torch.randint(1, 4, (5, 5), generator=generator))
        estimate = _partition(torch.randint(1, 4, (5, 5), generator=generator))
        eri, eri_t, eri_n = metrics.extended_rand_index(estimate, truth)
        assert 0.0 <= eri <= 1.0
        assert eri == pytest.approx((eri_t + eri_n) / 2)


def test_eri_is_one_when_slices_coincide():
    truth = _partition([[1, 1, 2], [1, 2, 2], [3, 3, 3]])
    assert metrics.extended_rand_index(truth, truth) == (1.0, 1.0, 1.0)
    single = _partition([[1, 1], [1, 1]])
    assert metrics.extended_rand_index(single, single)[0] == 1.0


def test_eri_requires_two_items_per_slice():
    with pytest.raises(ValueError):
        metrics.extended_rand_index(_partition([[1, 2, 3]]), _partition([[1, 1, 1]]))


def test_rmse_dominates_absolute_bias():
    generator = torch.Generator().manual_seed(2)
    for _ in range(50):
        beta_hat = torch.randn(4, 3, 2, generator=generator)
        beta_true = torch.randn(4, 3, 2, generator=generator)
        rmse, bias = metrics.rmse_bias(beta_hat, beta_true)
        assert rmse >= abs(bias)


def test_rmse_on_a_coefficient_slice():
    beta_true = torch.zeros(2, 2, 2)
    beta_hat = beta_true.clone()
    beta_hat[..., 1] = 2.0
    assert metrics.rmse_bias(beta_hat, beta_true, coefficients=[0]) == (0.0, 0.0)
    assert metrics.rmse_bias(beta_hat, beta_true, coefficients=[1]) == (2.0, 2.0)


def test_percent_correct():
    assert metrics.percent_correct_L([2, 2, 2], L0=2) == 1.0
    assert metrics.percent_correct_L([3, 1], L0=2) == 0.0
