import pytest
import torch

from panel_fusion import inference, panel, penalty, simulation, solver


def _fit(seed: int = 0):
    instance = simulation.gen_dgp2(N=10, T=5, err=simulation.ErrorSpec.homoscedastic(0.1), seed=seed)
    design = panel.build_design(instance.panel)
    idx = panel.build_fusion_index(10, 5)
    spec = penalty.PenaltySpec(kind="scad", level=1.0)
    fit = solver.run_admm(
        instance.panel,
        design,
        lambda_spec=spec,
        gamma_spec=spec,
        config=solver.AdmmConfig(tol_primal=1e-7, tol_change=1e-8, max_iterations=10000),
        init=solver.ridge_init(instance.panel, design),
        idx=idx,
    )
    return instance, design, idx, fit


def test_recovered_blocks_form_a_partition():
    instance, _, idx, fit = _fit()
    partition = inference.recover_blocks(fit.state, idx)

    assert int(partition.sizes().sum()) == 50
    assert sorted(torch.unique(partition.assignment).tolist()) == list(range(1, partition.n_blocks + 1))
    assert partition.block_values.shape == (partition.n_blocks, 2)


def test_recovery_is_stable_inside_the_threshold_band():
    _, _, idx, fit = _fit(seed=1)
    norms = torch.cat(
        [
            torch.linalg.vector_norm(fit.state.rho, dim=-1),
            torch.linalg.vector_norm(fit.state.delta, dim=-1),
        ]
    )
    zeros, nonzeros = norms[norms == 0], norms[norms > 0]
    low = float(zeros.max()) if zeros.numel() else 0.0
    high = float(nonzeros.min()) if nonzeros.numel() else 1.0

    reference = inference.recover_blocks(fit.state, idx, tol_fuse=low)
    for tol_fuse in (low, (low + high) / 2, high * 0.999):
        assert torch.equal(
            inference.recover_blocks(fit.state, idx, tol_fuse=tol_fuse).assignment,
            reference.assignment,
        )


def test_post_estimate_solves_the_block_normal_equations():
    instance, design, _, _ = _fit(seed=2)
    post = inference.post_estimate(instance.panel, design, instance.truth)
    residuals = instance.panel.outcomes - torch.sum(design * post.beta, dim=-1)

    for block in range(1, post.n_blocks + 1):
        mask = instance.truth.assignment == block
        gradient = design[mask].T @ residuals[mask]
        assert float(gradient.abs().max()) < 1e-8


def test_post_estimate_names_the_singular_block():
    data = panel.PanelData(outcomes=torch.randn(3, 3), regressors=torch.randn(3, 3, 1))
    labels = torch.ones(3, 3, dtype=torch.long)
    labels[2, 2] = 2
    partition = panel.BlockPartition(assignment=labels, block_values=torch.zeros(2, 2))

    from panel_fusion.utils.exceptions import SingularBlockError

    with pytest.raises(SingularBlockError) as error:
        inference.post_estimate(data, panel.build_design(data), partition)
    assert error.value.block == 2


def test_chi_square_statistic_is_invariant_to_row_scaling():
    instance, design, _, _ = _fit(seed=3)
    post = inference.oracle_estimate(instance.panel, design, instance.truth)
    contrast = inference.difference_contrast(3, 2, first=1, second=3).contrast

    statistic, dof, p_value = inference.chi_square_test(post, inference.HypothesisSpec(contrast=contrast))
    scaled, _, _ = inference.chi_square_test(
        post, inference.HypothesisSpec(contrast=torch.diag(torch.tensor([3.0, -0.5], dtype=torch.float64)) @ contrast)
    )
    assert dof == 2
    assert 0.0 <= p_value <= 1.0
    assert scaled == pytest.approx(statistic, rel=1e-10)


def test_coefficient_table_layout():
    instance, design, _, _ = _fit(seed=4)
    post = inference.oracle_estimate(instance.panel, design, instance.truth)
    table = inference.coefficient_table(post, names=["intercept", "x"])

    assert list(table.columns) == ["block", "coefficient", "estimate", "std_error", "z", "p_value", "stars"]
    assert len(table) == 6
    assert set(table["stars"]) <= {"", "*", "**", "***"}


def test_block_separation_of_dgp2():
    instance = simulation.gen_dgp2(N=10, T=4, err=simulation.ErrorSpec.homoscedastic(0.5), seed=0)
    separation = inference.block_separation(instance.truth, panel.build_fusion_index(10, 4))
    # closest pair of groups: (-2, 3) and (2, 6)
    assert separation == pytest.approx(5.0)


def test_sigma_hat_is_consistent():
    seeds = simulation.replicate_seeds(seed=2024, n=100)
    sigma2 = []
    for seed in seeds:
        instance = simulation.gen_dgp2(N=20, T=20, err=simulation.ErrorSpec.homoscedastic(1.0), seed=seed)
        design = panel.build_design(instance.panel)
        sigma2.append(inference.oracle_estimate(instance.panel, design, instance.truth).sigma_hat ** 2)
    assert 0.9 <= sum(sigma2) / len(sigma2) <= 1.1


@pytest.mark.slow
def test_chi_square_test_has_nominal_size():
    seeds = simulation.replicate_seeds(seed=7, n=500)
    rejections = 0
    for seed in seeds:
        instance = simulation.gen_dgp2(N=20, T=20, err=simulation.ErrorSpec.homoscedastic(1.0), seed=seed)
        design = panel.build_design(instance.panel)
        post = inference.oracle_estimate(instance.panel, design, instance.truth)
        hypothesis = inference.difference_contrast(3, 2, first=1, second=2)
        iota = instance.truth.block_values[0] - instance.truth.block_values[1]
        rejections += not inference.confidence_region_contains(post, hypothesis, iota=iota, tau=0.05)
    assert 0.02 <= rejections / len(seeds) <= 0.09
