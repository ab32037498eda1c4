import pytest
import torch

from panel_fusion import metrics, simulation, tuning


@pytest.mark.parametrize("seed", range(5))
def test_truth_is_a_valid_partition(seed):
    err = simulation.ErrorSpec.preset("hetero-1")
    for generate, L0 in ((simulation.gen_dgp1, 2), (simulation.gen_dgp2, 3)):
        instance = generate(N=20, T=20, err=err, seed=seed)
        assert instance.truth.n_blocks == L0
        assert torch.equal(instance.true_beta, instance.truth.expand())
        assert instance.panel.n_covariates == 2


def test_dgp1_template_counts():
    labels = simulation.dgp1_labels(40, 40)
    assert int((labels == 2).sum()) == 10 * 10 + 10 * 25
    assert bool((labels[:10] == 1).all()) and bool((labels[30:] == 1).all())


def test_heteroscedastic_errors_scale_with_the_regressor():
    spec = simulation.ErrorSpec.heteroscedastic(1.0)
    x = torch.full((200, 200), 3.0, dtype=torch.float64)
    errors = simulation.gen_errors(x, spec, seed=0)
    assert float(errors.std()) == pytest.approx(float(spec.scale(torch.tensor(3.0))), rel=0.02)


def test_replicate_seeds_are_independent_of_workers():
    grid = tuning.TuningGrid(gamma_values=(1.0,), lambda_values=(1.0,))
    settings = dict(
        dgp=2,
        N=10,
        T=4,
        err=simulation.ErrorSpec.homoscedastic(0.1),
        replicates=2,
        seed=3,
        grid=grid,
        tqdm_bar=False,
    )
    sequential = simulation.run_replicates(workers=1, **settings)
    parallel = simulation.run_replicates(workers=2, **settings)
    assert [o.seed for o in sequential] == [o.seed for o in parallel]
    assert [o.scores["penalized"].rmse for o in sequential] == pytest.approx(
        [o.scores["penalized"].rmse for o in parallel]
    )


def test_summary_has_one_row_per_estimator():
    outcomes = simulation.run_replicates(
        dgp=2,
        N=10,
        T=4,
        err=simulation.ErrorSpec.homoscedastic(0.1),
        replicates=2,
        seed=1,
        grid=tuning.TuningGrid(gamma_values=(1.0,), lambda_values=(1.0,)),
        tqdm_bar=False,
    )
    table = simulation.summarize(outcomes, L0=3)
    assert table["estimator"].tolist() == ["penalized", "post", "oracle"]
    assert table.loc[2, "per"] == 1.0
    assert table.loc[2, "eri"] == 1.0


@pytest.mark.slow
def test_dgp2_recovery():
    outcomes = simulation.run_replicates(
        dgp=2, N=20, T=20, err=simulation.ErrorSpec.homoscedastic(0.5), replicates=20, seed=2, tqdm_bar=False
    )
    table = simulation.summarize(outcomes, L0=3).set_index("estimator")
    assert table.loc["penalized", "per"] >= 0.9
    assert table.loc["penalized", "eri"] >= 0.98


@pytest.mark.slow
def test_dgp1_recovery_and_accuracy_ordering():
    outcomes = simulation.run_replicates(
        dgp=1, N=20, T=20, err=simulation.ErrorSpec.homoscedastic(0.5), replicates=20, seed=1, tqdm_bar=False
    )
    table = simulation.summarize(outcomes, L0=2).set_index("estimator")
    assert table.loc["penalized", "per"] >= 0.85
    assert table.loc["penalized", "eri"] >= 0.97

    oracle, post, penalized = (table.loc[name, "rmse"] for name in ("oracle", "post", "penalized"))
    assert oracle <= post <= penalized
    assert post <= 2 * oracle


def test_post_failures_are_reported_on_the_post_row_only():
    score = metrics.ReplicateScore(rmse=0.1, bias=0.0, l_hat=3, eri=1.0, eri_t=1.0, eri_n=1.0)
    outcomes = [
        simulation.ReplicateOutcome(
            seed=seed,
            scores={estimator: score for estimator in simulation.ESTIMATORS},
            selected=(0.5, 0.5),
            sigma_hat=None if failed else 1.0,
            oracle_sigma_hat=1.0,
            post_failed=failed,
        )
        for seed, failed in enumerate([True, False, False])
    ]
    table = simulation.summarize(outcomes, L0=3).set_index("estimator")

    assert table.loc["post", "post_failures"] == 1
    assert table[["post_failures"]].drop(index="post").isna().all().all()
    assert table.loc["post", "sigma2_hat"] == 1.0
