from dataclasses import dataclass

import numpy as np
import torch

from ..panel import BlockPartition, PanelData
from .errors import ErrorSpec, gen_errors, make_generator

__all__ = [
    "DGP1_ALPHA",
    "DGP2_ALPHA",
    "SimulatedInstance",
    "dgp1_labels",
    "gen_dgp1",
    "gen_dgp2",
    "replicate_seeds",
]

DGP1_ALPHA = ((-2.0, 3.0), (2.0, 5.0))
DGP2_ALPHA = ((-2.0, 3.0), (2.0, 6.0), (6.0, -1.0))


@dataclass(frozen=True)
class SimulatedInstance:
    """Simulated panel with its ground truth."""

    panel: PanelData
    truth: BlockPartition
    true_beta: torch.Tensor
    seed: int


def replicate_seeds(seed: int, n: int) -> list[int]:
    """Independent per-replicate seeds spawned from one master seed.

    Examples
    --------
    >>> from panel_fusion import simulation

    >>> seeds = simulation.replicate_seeds(seed=42, n=3)
    >>> len(set(seeds)), seeds == simulation.replicate_seeds(seed=42, n=3)
    (3, True)

    """
    return [
        int(child.generate_state(1)[0])
        for child in np.random.SeedSequence(seed).spawn(n)
    ]


def dgp1_labels(N: int, T: int) -> torch.Tensor:
    """Block labels of the irregular two-block design, scaled from the 40 x 40 template.

    Individuals are split into quarters. The first and last quarters stay in block 1. The
    second quarter joins block 2 over periods floor(19 T / 40) + 1 .. floor(29 T / 40), the
    third quarter over periods floor(9 T / 40) + 1 .. floor(34 T / 40).

    Examples
    --------
    >>> from panel_fusion import simulation

    >>> labels = simulation.dgp1_labels(N=40, T=40)
    >>> [t + 1 for t in range(40) if labels[10, t] == 2] == list(range(20, 30))
    True

    >>> [t + 1 for t in range(40) if labels[20, t] == 2] == list(range(10, 35))
    True

    >>> int((labels == 1).sum()), int((labels == 2).sum())
    (1250, 350)

    """
    if N % 4 != 0:
        raise ValueError(f"N must be a multiple of 4, got {N}.")
    if T < 10:
        raise ValueError(f"T must be at least 10, got {T}.")

    quarter = N // 4
    labels = torch.ones(N, T, dtype=torch.long)
    labels[quarter : 2 * quarter, (19 * T) // 40 : (29 * T) // 40] = 2
    labels[2 * quarter : 3 * quarter, (9 * T) // 40 : (34 * T) // 40] = 2
    return labels


def _instance(
    truth: BlockPartition,
    err: ErrorSpec,
    seed: int,
    shock_seed: np.random.SeedSequence,
    error_seed: np.random.SeedSequence,
) -> SimulatedInstance:
    true_beta = truth.expand()
    mu, eta = true_beta[..., 0], true_beta[..., 1]

    shock = torch.from_numpy(
        make_generator(shock_seed).standard_normal(size=tuple(mu.shape))
    )
    x = 1 + 0.5 * mu + shock
    y = mu + x * eta + gen_errors(x, err, seed=error_seed)

    return SimulatedInstance(
        panel=PanelData(outcomes=y, regressors=x.unsqueeze(-1)),
        truth=truth,
        true_beta=true_beta,
        seed=seed,
    )


def gen_dgp1(N: int, T: int, err: ErrorSpec, seed: int) -> SimulatedInstance:
    """Irregular block structure: two blocks with time-varying group memberships.

    Block 1 has alpha = (-2, 3), block 2 alpha = (2, 5). The regressor is
    x_it = 1 + 0.5 mu_it + e_it with standard normal e_it and the outcome
    y_it = mu_it + x_it eta_it + error.

    Parameters
    ----------
    N
        Number of individuals, a multiple of 4.
    T
        Number of periods, at least 10.
    err
        Error design.
    seed
        Seed of the instance.

    Examples
    --------
    >>> from panel_fusion import simulation
    >>> import torch

    >>> instance = simulation.gen_dgp1(N=20, T=20, err=simulation.ErrorSpec.homoscedastic(1e-12), seed=7)
    >>> instance.truth.n_blocks
    2

    >>> x = instance.panel.regressors[..., 0]
    >>> expected = instance.true_beta[..., 0] + x * instance.true_beta[..., 1]
    >>> bool((instance.panel.outcomes - expected).abs().max() < 1e-5)
    True

    >>> again = simulation.gen_dgp1(N=20, T=20, err=simulation.ErrorSpec.homoscedastic(1e-12), seed=7)
    >>> torch.equal(instance.panel.outcomes, again.panel.outcomes)
    True

    """
    truth = BlockPartition.from_labels(dgp1_labels(N, T), block_values=DGP1_ALPHA)
    _, shock_seed, error_seed = np.random.SeedSequence(seed).spawn(3)
    return _instance(truth, err, seed, shock_seed, error_seed)


def gen_dgp2(N: int, T: int, err: ErrorSpec, seed: int) -> SimulatedInstance:
    """Pure group structure: three time-constant groups in proportion 3:3:4.

    Individuals are assigned to the groups at random. Groups carry alpha = (-2, 3),
    (2, 6) and (6, -1).

    Examples
    --------
    >>> from panel_fusion import simulation

    >>> instance = simulation.gen_dgp2(N=20, T=5, err=simulation.ErrorSpec.homoscedastic(0.5), seed=3)
    >>> instance.truth.n_blocks
    3

    >>> sorted((instance.truth.sizes() // 5).tolist())
    [6, 6, 8]

    >>> bool((instance.truth.assignment == instance.truth.assignment[:, :1]).all())
    True

    >>> simulation.gen_dgp2(N=15, T=5, err=simulation.ErrorSpec.homoscedastic(0.5), seed=3)
    Traceback (most recent call last):
    ...
    ValueError: N must be a multiple of 10, got 15.

    """
    if N % 10 != 0:
        raise ValueError(f"N must be a multiple of 10, got {N}.")
    if T < 2:
        raise ValueError(f"T must be at least 2, got {T}.")

    assignment_seed, shock_seed, error_seed = np.random.SeedSequence(seed).spawn(3)
    order = make_generator(assignment_seed).permutation(N)

    groups = np.empty(N, dtype=np.int64)
    groups[order[: 3 * N // 10]] = 1
    groups[order[3 * N // 10 : 6 * N // 10]] = 2
    groups[order[6 * N // 10 :]] = 3

    labels = torch.from_numpy(groups).unsqueeze(-1).expand(N, T)
    truth = BlockPartition.from_labels(labels, block_values=DGP2_ALPHA)
    return _instance(truth, err, seed, shock_seed, error_seed)
