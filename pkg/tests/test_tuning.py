import pytest
import torch

from panel_fusion import inference, panel, solver, tuning


def _noiseless_two_blocks(seed: int = 0):
    """Two blocks: individuals 5..8 over periods 3..6 form block 2, the rest block 1."""
    generator = torch.Generator().manual_seed(seed)
    labels = torch.ones(8, 6, dtype=torch.long)
    labels[4:, 2:] = 2
    alpha = torch.tensor([[0.0, 1.0], [4.0, 5.0]], dtype=torch.float64)
    truth = panel.BlockPartition(assignment=labels, block_values=alpha)

    x = 1 + torch.randn(8, 6, generator=generator, dtype=torch.float64)
    beta = truth.expand()
    data = panel.PanelData(outcomes=beta[..., 0] + x * beta[..., 1], regressors=x.unsqueeze(-1))
    return data, truth


def test_noiseless_instance_recovers_the_oracle():
    data, truth = _noiseless_two_blocks()
    design = panel.build_design(data)
    grid = tuning.TuningGrid(gamma_values=(0.5, 1.0, 1.5), lambda_values=(0.5, 1.0, 1.5))

    path = tuning.solution_path(
        data,
        design,
        grid,
        penalty_kind="scad",
        config=solver.AdmmConfig(tol_primal=1e-8, tol_change=1e-9, max_iterations=10000),
        tqdm_bar=False,
    )
    best = path.best
    assert torch.equal(best.partition.assignment, truth.assignment)

    post = inference.post_estimate(data, design, best.partition)
    assert torch.allclose(post.alpha, truth.block_values, atol=1e-8)


def test_selected_point_minimizes_bic():
    generator = torch.Generator().manual_seed(1)
    outcomes = torch.cat([torch.zeros(3, 4), torch.full((3, 4), 3.0)]).double()
    data = panel.PanelData(
        outcomes=outcomes + 0.3 * torch.randn(6, 4, generator=generator, dtype=torch.float64),
        regressors=torch.zeros(6, 4, 0),
    )
    path = tuning.solution_path(
        data,
        panel.build_design(data),
        tuning.TuningGrid(gamma_values=(0.2, 0.6, 1.0), lambda_values=(0.2, 0.6, 1.0)),
        tqdm_bar=False,
    )
    scored = {key: point.bic for key, point in path.points.items() if not point.failed}
    best = min(scored.values())
    tied = [key for key, bic in scored.items() if bic <= best + 1e-6 * max(1.0, abs(best))]
    assert path.selected == min(tied)

    surface = path.surface()
    assert list(surface.columns) == ["gamma", "lambda", "bic", "l_hat", "converged", "error"]
    assert len(surface) == 9


def test_warm_and_cold_paths_agree_in_the_convex_case():
    generator = torch.Generator().manual_seed(2)
    data = panel.PanelData(
        outcomes=torch.randn(4, 4, generator=generator, dtype=torch.float64),
        regressors=torch.randn(4, 4, 1, generator=generator, dtype=torch.float64),
    )
    design = panel.build_design(data)
    config = solver.AdmmConfig(tol_primal=1e-9, tol_change=1e-10, max_iterations=20000)
    lambdas = (0.2, 0.4, 0.8)

    warm = tuning.solution_path(
        data,
        design,
        tuning.TuningGrid(gamma_values=(0.3,), lambda_values=lambdas),
        penalty_kind="lasso",
        config=config,
        tqdm_bar=False,
    )
    for lambda_ in lambdas:
        cold = tuning.solution_path(
            data,
            design,
            tuning.TuningGrid(gamma_values=(0.3,), lambda_values=(lambda_,)),
            penalty_kind="lasso",
            config=config,
            tqdm_bar=False,
        )
        assert warm.points[(0.3, lambda_)].fit.objective == pytest.approx(
            cold.points[(0.3, lambda_)].fit.objective, abs=1e-6
        )


def test_large_levels_select_a_single_block():
    generator = torch.Generator().manual_seed(3)
    data = panel.PanelData(
        outcomes=torch.randn(4, 5, generator=generator, dtype=torch.float64),
        regressors=torch.randn(4, 5, 1, generator=generator, dtype=torch.float64),
    )
    path = tuning.solution_path(
        data,
        panel.build_design(data),
        tuning.TuningGrid(gamma_values=(50.0,), lambda_values=(50.0,)),
        config=solver.AdmmConfig(tol_primal=1e-8, tol_change=1e-9, max_iterations=10000),
        tqdm_bar=False,
    )
    assert path.best.l_hat == 1


def test_parallel_rows_match_sequential_rows():
    data, _ = _noiseless_two_blocks(seed=4)
    design = panel.build_design(data)
    grid = tuning.TuningGrid(gamma_values=(0.5, 1.0), lambda_values=(0.5, 1.0))

    sequential = tuning.solution_path(data, design, grid, tqdm_bar=False)
    parallel = tuning.solution_path(data, design, grid, workers=2, tqdm_bar=False)

    assert parallel.selected == sequential.selected
    for key, point in sequential.points.items():
        assert parallel.points[key].l_hat == point.l_hat


def test_bic_uses_the_complexity_constant():
    default = tuning.bic_value(sse=10.0, n_observations=50, n_covariates=2, l_hat=3)
    doubled = tuning.bic_value(
        sse=10.0, n_observations=50, n_covariates=2, l_hat=3, c_nt=2 * torch.log(torch.tensor(100.0)).item()
    )
    assert doubled - default == pytest.approx(default - torch.log(torch.tensor(0.2)).item())


def test_bic_ties_within_stopping_noise_prefer_the_smallest_levels():
    bics = {
        0.1: -0.1,
        0.3: -0.16520227,
        0.7: -0.16520241,
        1.3: -0.16520250,
        1.5: -0.12,
    }
    points = {
        (0.5, lambda_): tuning.GridPoint(gamma=0.5, lambda_=lambda_, bic=bic)
        for lambda_, bic in bics.items()
    }
    points[(0.2, 0.1)] = tuning.GridPoint(gamma=0.2, lambda_=0.1, error="SolverError")

    assert tuning.select_point(points) == (0.5, 0.3)
    assert tuning.select_point(points, bic_tol=0.0) == (0.5, 1.3)

    points[(0.5, 1.5)] = tuning.GridPoint(gamma=0.5, lambda_=1.5, bic=-0.2)
    assert tuning.select_point(points) == (0.5, 1.5)


def test_select_point_skips_failed_points():
    points = {(0.1, 0.1): tuning.GridPoint(gamma=0.1, lambda_=0.1, error="SolverError")}
    assert tuning.select_point(points) is None
