from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import pandas as pd
import torch

from .. import utils
from ..inference import recover_blocks
from ..panel import BlockPartition, FusionIndex, PanelData, build_fusion_index
from ..penalty import PenaltySpec
from ..solver import AdmmConfig, FitResult, RidgeConfig, ridge_init, run_admm
from ..utils.exceptions import DegenerateFitError, PathError, SolverError
from .bic import bic_score
from .grid import TuningGrid

__all__ = ["GridPoint", "PathResult", "fit_point", "select_point", "solution_path"]


@dataclass(frozen=True)
class GridPoint:
    """Outcome of one (gamma, lambda) grid point. `error` is set when the fit failed."""

    gamma: float
    lambda_: float
    fit: FitResult = None
    partition: BlockPartition = None
    bic: float = None
    error: str = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    @property
    def l_hat(self) -> int:
        return None if self.partition is None else self.partition.n_blocks


@dataclass(frozen=True)
class PathResult:
    """Every scored grid point and the selected (gamma, lambda)."""

    points: dict = field(default_factory=dict)
    selected: tuple = None

    @property
    def best(self) -> GridPoint:
        return self.points[self.selected]

    def surface(self) -> pd.DataFrame:
        """BIC surface, one row per grid point."""
        return pd.DataFrame(
            [
                {
                    "gamma": point.gamma,
                    "lambda": point.lambda_,
                    "bic": point.bic,
                    "l_hat": point.l_hat,
                    "converged": None if point.fit is None else point.fit.converged,
                    "error": point.error,
                }
                for _, point in sorted(self.points.items())
            ]
        )


def fit_point(
    panel: PanelData,
    design: torch.Tensor,
    lambda_spec: PenaltySpec,
    gamma_spec: PenaltySpec,
    config: AdmmConfig,
    init: torch.Tensor,
    idx: FusionIndex,
    tol_fuse: float = 1e-6,
    c_nt: float = None,
) -> GridPoint:
    """Fit, recover the blocks and score one grid point. Solver failures are recorded."""
    try:
        fit = run_admm(
            panel, design, lambda_spec, gamma_spec, config, init=init, idx=idx
        )
        partition = recover_blocks(fit.state, idx, tol_fuse=tol_fuse)
        bic = bic_score(fit, panel, l_hat=partition.n_blocks, c_nt=c_nt)
    except (SolverError, DegenerateFitError) as error:
        utils.failed_fit_warning(
            gamma=gamma_spec.level, lambda_=lambda_spec.level, error=error
        )
        return GridPoint(
            gamma=gamma_spec.level,
            lambda_=lambda_spec.level,
            error=f"{type(error).__name__}: {error}",
        )

    return GridPoint(
        gamma=gamma_spec.level,
        lambda_=lambda_spec.level,
        fit=fit,
        partition=partition,
        bic=bic,
    )


def _solve_row(
    panel: PanelData,
    design: torch.Tensor,
    gamma: float,
    lambda_values: tuple,
    penalty_kind: str,
    concavity: float,
    config: AdmmConfig,
    init: torch.Tensor,
    idx: FusionIndex,
    tol_fuse: float,
    c_nt: float,
) -> list[GridPoint]:
    """One row of the grid at fixed gamma, lambda ascending, each fit warm started."""
    gamma_spec = PenaltySpec(kind=penalty_kind, level=gamma, concavity=concavity)
    points, start = [], init
    for lambda_ in lambda_values:
        point = fit_point(
            panel,
            design,
            lambda_spec=gamma_spec.with_level(lambda_),
            gamma_spec=gamma_spec,
            config=config,
            init=start,
            idx=idx,
            tol_fuse=tol_fuse,
            c_nt=c_nt,
        )
        points.append(point)
        start = init if point.failed else point.fit.beta
    return points


def select_point(points: dict, bic_tol: float = 1e-6) -> tuple:
    """Key of the minimal BIC, ties going to the smallest (gamma, lambda).

    BIC values within `bic_tol * max(1, |min BIC|)` of the minimum are tied, which absorbs
    the ADMM stopping noise between fits sharing the same partition.

    Examples
    --------
    >>> from panel_fusion import tuning

    >>> points = {
    ...     (0.5, 0.1): tuning.GridPoint(gamma=0.5, lambda_=0.1, bic=-0.1),
    ...     (0.5, 0.3): tuning.GridPoint(gamma=0.5, lambda_=0.3, bic=-0.16520227),
    ...     (0.5, 1.3): tuning.GridPoint(gamma=0.5, lambda_=1.3, bic=-0.16520250),
    ... }
    >>> tuning.select_point(points)
    (0.5, 0.3)

    >>> tuning.select_point(points, bic_tol=1e-9)
    (0.5, 1.3)

    """
    scored = {key: point.bic for key, point in points.items() if not point.failed}
    if not scored:
        return None
    best = min(scored.values())
    band = bic_tol * max(1.0, abs(best))
    return min(key for key, bic in scored.items() if bic <= best + band)


def solution_path(
    panel: PanelData,
    design: torch.Tensor,
    grid: TuningGrid,
    penalty_kind: str = "scad",
    config: AdmmConfig = None,
    init: torch.Tensor = None,
    concavity: float = None,
    ridge: RidgeConfig = None,
    tol_fuse: float = 1e-6,
    c_nt: float = None,
    idx: FusionIndex = None,
    workers: int = 1,
    tqdm_bar: bool = True,
    bic_tol: float = 1e-6,
) -> PathResult:
    """Fit every (gamma, lambda) of the grid and select the minimal BIC.

    Rows of fixed gamma start from the ridge fusion initializer and move through lambda in
    ascending order, each fit warm started from the previous converged estimate. Rows are
    independent and run in parallel when `workers > 1`. BIC values within `bic_tol` of the
    minimum are ties, which go to the smallest (gamma, lambda).

    Parameters
    ----------
    panel
        Panel data.
    design
        Design tensor.
    grid
        Tuning grid.
    penalty_kind
        `lasso`, `scad` or `mcp`, used for both fusion directions.
    config
        ADMM settings.
    init
        Starting field of every row, the ridge fusion initializer when omitted.
    concavity
        Concavity of SCAD / MCP, conventional default when omitted.
    ridge
        Ridge initializer levels.
    tol_fuse
        Fusion threshold of the block recovery.
    c_nt
        BIC complexity constant, log(N T P) when omitted.
    idx
        Fusion index.
    workers
        Number of worker processes over grid rows.
    tqdm_bar
        Whether to display a progress bar over the rows.
    bic_tol
        Relative band of BIC values treated as tied, see `select_point`.

    Examples
    --------
    >>> from panel_fusion import panel, tuning
    >>> import torch

    >>> _ = torch.manual_seed(42)

    >>> outcomes = torch.cat([torch.zeros(3, 4), torch.full((3, 4), 5.0)]) + 0.01 * torch.randn(6, 4)
    >>> data = panel.PanelData(outcomes=outcomes, regressors=torch.zeros(6, 4, 0))
    >>> design = panel.build_design(data)

    >>> path = tuning.solution_path(
    ...     data,
    ...     design,
    ...     grid=tuning.TuningGrid(gamma_values=(1.0,), lambda_values=(1.0,)),
    ...     tqdm_bar=False,
    ... )

    >>> path.selected
    (1.0, 1.0)

    >>> path.best.l_hat
    2

    >>> path.best.partition.assignment[:, 0]
    tensor([1, 1, 1, 2, 2, 2])

    """
    config = AdmmConfig() if config is None else config
    idx = build_fusion_index(panel.n_individuals, panel.n_periods) if idx is None else idx

    template = PenaltySpec(kind=penalty_kind, level=0.0, concavity=concavity)
    template.validate(step=config.psi)
    template.validate(step=config.phi)

    if init is None:
        init = ridge_init(panel, design, config=ridge, solver=config, idx=idx)

    rows = [
        (
            panel,
            design,
            gamma,
            grid.lambda_values,
            penalty_kind,
            template.concavity,
            config,
            init,
            idx,
            tol_fuse,
            c_nt,
        )
        for gamma in grid.gamma_values
    ]

    points = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = executor.map(_solve_row, *zip(*rows))
            for row in utils.progress(
                results,
                desc="solution path",
                total=len(rows),
                tqdm_bar=tqdm_bar,
            ):
                points.update({(p.gamma, p.lambda_): p for p in row})
    else:
        for args in utils.progress(
            rows, desc="solution path", total=len(rows), tqdm_bar=tqdm_bar
        ):
            points.update({(p.gamma, p.lambda_): p for p in _solve_row(*args)})

    selected = select_point(points, bic_tol=bic_tol)
    if selected is None:
        raise PathError(
            "Every grid point failed.",
            failures={key: point.error for key, point in points.items()},
        )

    return PathResult(points=points, selected=selected)
