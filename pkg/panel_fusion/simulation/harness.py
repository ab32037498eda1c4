from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import pandas as pd

from .. import utils
from ..inference import PostEstimate, oracle_estimate, post_estimate
from ..metrics import (
    ReplicateScore,
    extended_rand_index,
    rmse_bias,
    summarize_replicates,
)
from ..panel import BlockPartition, build_design, build_fusion_index
from ..solver import AdmmConfig, RidgeConfig
from ..tuning import TuningGrid, solution_path
from ..utils.exceptions import SingularBlockError
from .dgp import SimulatedInstance, gen_dgp1, gen_dgp2, replicate_seeds
from .errors import ErrorSpec

__all__ = [
    "ESTIMATORS",
    "ReplicateOutcome",
    "generate",
    "run_replicate",
    "run_replicates",
    "summarize",
]

ESTIMATORS = ("penalized", "post", "oracle")

_GENERATORS = {1: gen_dgp1, 2: gen_dgp2}


@dataclass(frozen=True)
class ReplicateOutcome:
    """Scores of one Monte Carlo replicate.

    Parameters
    ----------
    seed
        Seed of the simulated instance.
    scores
        ReplicateScore per estimator, keyed by `penalized`, `post` and `oracle`.
    selected
        Selected (gamma, lambda).
    sigma_hat
        Residual standard deviation of the post estimator, None when it could not be fit.
    oracle_sigma_hat
        Residual standard deviation of the oracle estimator.
    post_failed
        Whether the recovered partition had a singular block, the post scores then repeat
        the penalized ones.

    """

    seed: int
    scores: dict = field(default_factory=dict)
    selected: tuple = None
    sigma_hat: float = None
    oracle_sigma_hat: float = None
    post_failed: bool = False


def generate(dgp: int, N: int, T: int, err: ErrorSpec, seed: int) -> SimulatedInstance:
    """Simulated instance of DGP 1 or 2."""
    if dgp not in _GENERATORS:
        raise ValueError(f"Unknown data generating process {dgp}, expected 1 or 2.")
    return _GENERATORS[dgp](N=N, T=T, err=err, seed=seed)


def _score(
    beta_hat, partition: BlockPartition, instance: SimulatedInstance
) -> ReplicateScore:
    rmse, bias = rmse_bias(beta_hat, instance.true_beta)
    rmse_slope, bias_slope = rmse_bias(
        beta_hat, instance.true_beta, coefficients=list(range(1, beta_hat.shape[-1]))
    )
    eri, eri_t, eri_n = extended_rand_index(partition, instance.truth)
    return ReplicateScore(
        rmse=rmse,
        bias=bias,
        l_hat=partition.n_blocks,
        eri=eri,
        eri_t=eri_t,
        eri_n=eri_n,
        rmse_slope=rmse_slope,
        bias_slope=bias_slope,
    )


def run_replicate(
    dgp: int,
    N: int,
    T: int,
    err: ErrorSpec,
    seed: int,
    grid: TuningGrid = None,
    penalty_kind: str = "scad",
    config: AdmmConfig = None,
    ridge: RidgeConfig = None,
    tol_fuse: float = 1e-6,
    c_nt: float = None,
) -> ReplicateOutcome:
    """Simulate one instance, tune the penalized estimator and score it against the truth.

    The penalized estimator is the fit selected by BIC over the grid, the post estimator
    refits least squares on its recovered blocks and the oracle refits on the true blocks.

    Parameters
    ----------
    dgp
        1 for the irregular two-block design, 2 for the three-group design.
    N
        Number of individuals.
    T
        Number of periods.
    err
        Error design.
    seed
        Seed of the simulated instance.
    grid
        Tuning grid, the `sim` preset when omitted.
    penalty_kind
        `lasso`, `scad` or `mcp`.
    config
        ADMM settings.
    ridge
        Ridge initializer levels.
    tol_fuse
        Fusion threshold of the block recovery.
    c_nt
        BIC complexity constant.

    Examples
    --------
    >>> from panel_fusion import simulation, tuning

    >>> outcome = simulation.run_replicate(
    ...     dgp=2,
    ...     N=10,
    ...     T=4,
    ...     err=simulation.ErrorSpec.homoscedastic(0.01),
    ...     seed=1,
    ...     grid=tuning.TuningGrid(gamma_values=(1.0,), lambda_values=(1.0,)),
    ... )

    >>> sorted(outcome.scores)
    ['oracle', 'penalized', 'post']

    >>> outcome.scores["oracle"].l_hat, outcome.scores["oracle"].eri
    (3, 1.0)

    """
    grid = TuningGrid.preset("sim") if grid is None else grid
    instance = generate(dgp, N=N, T=T, err=err, seed=seed)
    design = build_design(instance.panel)
    idx = build_fusion_index(N, T)

    path = solution_path(
        instance.panel,
        design,
        grid,
        penalty_kind=penalty_kind,
        config=config,
        ridge=ridge,
        tol_fuse=tol_fuse,
        c_nt=c_nt,
        idx=idx,
        tqdm_bar=False,
    )
    best = path.best

    oracle: PostEstimate = oracle_estimate(instance.panel, design, instance.truth)
    scores = {
        "penalized": _score(best.fit.beta, best.partition, instance),
        "oracle": _score(oracle.beta, instance.truth, instance),
    }

    try:
        post = post_estimate(instance.panel, design, best.partition)
    except SingularBlockError:
        scores["post"] = scores["penalized"]
        sigma_hat, post_failed = None, True
    else:
        scores["post"] = _score(post.beta, best.partition, instance)
        sigma_hat, post_failed = post.sigma_hat, False

    return ReplicateOutcome(
        seed=seed,
        scores=scores,
        selected=path.selected,
        sigma_hat=sigma_hat,
        oracle_sigma_hat=oracle.sigma_hat,
        post_failed=post_failed,
    )


def run_replicates(
    dgp: int,
    N: int,
    T: int,
    err: ErrorSpec,
    replicates: int = 100,
    seed: int = 42,
    grid: TuningGrid = None,
    penalty_kind: str = "scad",
    config: AdmmConfig = None,
    ridge: RidgeConfig = None,
    tol_fuse: float = 1e-6,
    c_nt: float = None,
    workers: int = 1,
    tqdm_bar: bool = True,
) -> list[ReplicateOutcome]:
    """Monte Carlo replicates with seeds spawned from one master seed.

    Replicates are independent and run in `workers` processes when `workers > 1`. The output
    order follows the spawned seeds whatever the number of workers.

    Examples
    --------
    >>> from panel_fusion import simulation, tuning

    >>> outcomes = simulation.run_replicates(
    ...     dgp=2,
    ...     N=10,
    ...     T=4,
    ...     err=simulation.ErrorSpec.homoscedastic(0.01),
    ...     replicates=2,
    ...     seed=5,
    ...     grid=tuning.TuningGrid(gamma_values=(1.0,), lambda_values=(1.0,)),
    ...     tqdm_bar=False,
    ... )

    >>> [outcome.seed for outcome in outcomes] == simulation.replicate_seeds(seed=5, n=2)
    True

    """
    if replicates < 1:
        raise ValueError(f"At least one replicate is required, got {replicates}.")

    seeds = replicate_seeds(seed, replicates)
    settings = dict(
        dgp=dgp,
        N=N,
        T=T,
        err=err,
        grid=grid,
        penalty_kind=penalty_kind,
        config=config,
        ridge=ridge,
        tol_fuse=tol_fuse,
        c_nt=c_nt,
    )

    outcomes = []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [
                executor.submit(run_replicate, seed=s, **settings) for s in seeds
            ]
            for future in utils.progress(
                futures, desc="replicates", total=len(futures), tqdm_bar=tqdm_bar
            ):
                outcomes.append(future.result())
    else:
        for s in utils.progress(
            seeds, desc="replicates", total=len(seeds), tqdm_bar=tqdm_bar
        ):
            outcomes.append(run_replicate(seed=s, **settings))

    return outcomes


def summarize(outcomes: list[ReplicateOutcome], L0: int) -> pd.DataFrame:
    """Aggregate table of the replicates, one row per estimator."""
    table = summarize_replicates(
        {
            estimator: [outcome.scores[estimator] for outcome in outcomes]
            for estimator in ESTIMATORS
        },
        L0=L0,
    )
    sigma_hats = [o.sigma_hat**2 for o in outcomes if o.sigma_hat is not None]
    table["sigma2_hat"] = [
        None,
        sum(sigma_hats) / len(sigma_hats) if sigma_hats else None,
        sum(o.oracle_sigma_hat**2 for o in outcomes) / len(outcomes),
    ]
    table["post_failures"] = [None, sum(int(o.post_failed) for o in outcomes), None]
    return table
