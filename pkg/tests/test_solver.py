import pytest
import torch

from panel_fusion import inference, panel, penalty, simulation, solver
from panel_fusion.utils.exceptions import SolverError


def _instance(N: int, T: int, P: int, seed: int):
    generator = torch.Generator().manual_seed(seed)
    data = panel.PanelData(
        outcomes=torch.randn(N, T, generator=generator, dtype=torch.float64),
        regressors=torch.randn(N, T, P - 1, generator=generator, dtype=torch.float64),
    )
    return data, panel.build_design(data)


def test_krylov_matches_dense_solver():
    generator = torch.Generator().manual_seed(11)
    for seed in range(50):
        N, T = (int(v) for v in torch.randint(2, 7, (2,), generator=generator))
        P = int(torch.randint(1, 4, (1,), generator=generator))
        _, design = _instance(N, T, P, seed)
        idx = panel.build_fusion_index(N, T)
        system = solver.FusedSystem(design, psi=1.0, phi=1.0)
        b = torch.randn(N, T, P, generator=generator, dtype=torch.float64)

        krylov = solver.solve_system(system, b, solver.AdmmConfig(linear_solver="krylov", krylov_tol=1e-13), idx=idx)
        dense = solver.solve_system(system, b, solver.AdmmConfig(linear_solver="dense"), idx=idx)
        assert torch.linalg.norm(krylov - dense) <= 1e-8 * torch.linalg.norm(dense)


def test_fusion_operator_annihilates_constants():
    _, design = _instance(4, 5, 2, seed=0)
    idx = panel.build_fusion_index(4, 5)
    system = solver.FusedSystem(design, psi=2.0, phi=0.5)
    constant = torch.tensor([1.5, -2.0], dtype=torch.float64).expand(4, 5, 2)

    assert float(system.fusion_matvec(constant).abs().max()) < 1e-12

    omega, phi = panel.fusion_matrices(idx, P=2)
    fusion = 2.0 * omega.T @ omega + 0.5 * phi.T @ phi
    assert float((fusion @ constant.flatten()).abs().max()) < 1e-12

    _, info = torch.linalg.cholesky_ex(system.dense(idx))
    assert int(info) == 0


def test_krylov_reports_non_convergence():
    _, design = _instance(4, 4, 2, seed=1)
    system = solver.FusedSystem(design, psi=1.0, phi=1.0)
    b = torch.randn(4, 4, 2, generator=torch.Generator().manual_seed(2), dtype=torch.float64)
    with pytest.raises(SolverError) as error:
        solver.conjugate_gradient(system, b, tol=1e-12, max_iter=1)
    assert error.value.iterations == 1
    assert error.value.residual > 1e-12


@pytest.mark.parametrize("kind", ["lasso", "scad", "mcp"])
def test_converged_constraints_hold(kind):
    data, design = _instance(5, 4, 2, seed=2)
    idx = panel.build_fusion_index(5, 4)
    spec = penalty.PenaltySpec(kind=kind, level=0.4)
    config = solver.AdmmConfig(tol_primal=1e-6, tol_change=1e-7, max_iterations=5000)

    fit = solver.run_admm(
        data,
        design,
        lambda_spec=spec,
        gamma_spec=spec,
        config=config,
        init=solver.ridge_init(data, design),
        idx=idx,
    )
    assert fit.converged

    individual, period = panel.fused_differences(fit.beta, idx)
    assert float(torch.linalg.vector_norm(individual - fit.state.rho, dim=-1).max()) <= config.tol_primal
    assert float(torch.linalg.vector_norm(period - fit.state.delta, dim=-1).max()) <= config.tol_primal


def test_lasso_objective_decreases_over_the_run():
    data, design = _instance(4, 4, 2, seed=4)
    spec = penalty.PenaltySpec(kind="lasso", level=0.3)

    fit = solver.run_admm(
        data,
        design,
        lambda_spec=spec,
        gamma_spec=spec,
        config=solver.AdmmConfig(tol_primal=1e-7, tol_change=1e-8, max_iterations=5000),
        init=solver.ridge_init(data, design),
        record_objective=True,
    )
    assert fit.objective_trace[-1] <= fit.objective_trace[0] + 1e-8
    assert fit.objective == pytest.approx(fit.objective_trace[-1])


def test_fit_is_equivariant_under_individual_relabeling():
    data, design = _instance(5, 3, 2, seed=6)
    permutation = torch.tensor([3, 0, 4, 2, 1])
    permuted = panel.PanelData(
        outcomes=data.outcomes[permutation], regressors=data.regressors[permutation]
    )
    spec = penalty.PenaltySpec(kind="lasso", level=0.3)
    config = solver.AdmmConfig(tol_primal=1e-9, tol_change=1e-10, max_iterations=10000)

    def fit(d):
        x = panel.build_design(d)
        return solver.run_admm(
            d, x, lambda_spec=spec, gamma_spec=spec, config=config, init=solver.ridge_init(d, x)
        ).beta

    assert torch.allclose(fit(data)[permutation], fit(permuted), atol=1e-6)


def test_ridge_init_is_equivariant_and_beats_trivial_fits():
    data, design = _instance(6, 4, 2, seed=8)
    permutation = torch.randperm(6, generator=torch.Generator().manual_seed(1))
    permuted = panel.PanelData(
        outcomes=data.outcomes[permutation], regressors=data.regressors[permutation]
    )

    beta = solver.ridge_init(data, design)
    assert torch.allclose(
        beta[permutation], solver.ridge_init(permuted, panel.build_design(permuted)), atol=1e-8
    )

    x, y = design.reshape(-1, 2), data.outcomes.reshape(-1)
    pooled = torch.linalg.lstsq(x, y.unsqueeze(-1)).solution.squeeze(-1).expand(6, 4, 2)
    value = solver.ridge_objective(data, design, beta)
    assert value <= solver.ridge_objective(data, design, torch.zeros(6, 4, 2))
    assert value <= solver.ridge_objective(data, design, pooled)


def test_large_penalties_fuse_everything():
    data, design = _instance(4, 4, 2, seed=9)
    spec = penalty.PenaltySpec(kind="lasso", level=100.0)
    fit = solver.run_admm(
        data,
        design,
        lambda_spec=spec,
        gamma_spec=spec,
        config=solver.AdmmConfig(tol_primal=1e-8, tol_change=1e-9, max_iterations=10000),
        init=solver.ridge_init(data, design),
    )
    x, y = design.reshape(-1, 2), data.outcomes.reshape(-1)
    pooled = torch.linalg.lstsq(x, y.unsqueeze(-1)).solution.squeeze(-1)

    assert bool((fit.state.rho == 0).all()) and bool((fit.state.delta == 0).all())
    assert fit.sse == pytest.approx(float(torch.sum((y - x @ pooled) ** 2)), rel=1e-5)


def test_admm_rejects_invalid_concavity():
    data, design = _instance(3, 3, 1, seed=0)
    with pytest.raises(ValueError, match="SCAD requires"):
        solver.run_admm(
            data,
            design,
            lambda_spec=penalty.PenaltySpec(kind="scad", level=1.0, concavity=2.5),
            gamma_spec=penalty.PenaltySpec(kind="scad", level=1.0),
            config=solver.AdmmConfig(psi=0.5),
            init=torch.zeros(3, 3, 1),
        )


def _separated_blocks(seed: int):
    """Noiseless 6 x 6 panel, cells (4..6) x (4..6) form block 2."""
    generator = torch.Generator().manual_seed(seed)
    labels = torch.ones(6, 6, dtype=torch.long)
    labels[3:, 3:] = 2
    truth = panel.BlockPartition(
        assignment=labels, block_values=torch.tensor([[0.0, 1.0], [4.0, 5.0]])
    )
    x = 1 + torch.randn(6, 6, generator=generator, dtype=torch.float64)
    beta = truth.expand()
    data = panel.PanelData(outcomes=beta[..., 0] + x * beta[..., 1], regressors=x.unsqueeze(-1))
    return data, truth


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_true_blocks_are_a_fixed_point_of_scad_fusion(seed):
    data, truth = _separated_blocks(seed)
    design = panel.build_design(data)
    idx = panel.build_fusion_index(6, 6)
    spec = penalty.PenaltySpec(kind="scad", level=0.5)

    fit = solver.run_admm(
        data,
        design,
        lambda_spec=spec,
        gamma_spec=spec,
        config=solver.AdmmConfig(),
        init=truth.expand(),
        idx=idx,
    )

    assert fit.converged
    assert float((fit.beta - truth.expand()).abs().max()) < 1e-4
    partition = inference.recover_blocks(fit.state, idx)
    assert torch.equal(partition.assignment, truth.assignment)


def test_huge_scad_levels_give_pooled_least_squares():
    instance = simulation.gen_dgp2(
        N=20, T=20, err=simulation.ErrorSpec.homoscedastic(0.5), seed=3
    )
    data = instance.panel
    design = panel.build_design(data)
    idx = panel.build_fusion_index(20, 20)
    spec = penalty.PenaltySpec(kind="scad", level=1e6)

    fit = solver.run_admm(
        data,
        design,
        lambda_spec=spec,
        gamma_spec=spec,
        config=solver.AdmmConfig(tol_primal=1e-9, tol_change=1e-10, max_iterations=10000),
        init=solver.ridge_init(data, design),
        idx=idx,
    )

    x, y = design.reshape(-1, 2), data.outcomes.reshape(-1)
    pooled = torch.linalg.lstsq(x, y.unsqueeze(-1)).solution.squeeze(-1)

    assert fit.converged
    assert inference.recover_blocks(fit.state, idx).n_blocks == 1
    assert float((fit.beta - pooled).abs().max()) < 1e-6
