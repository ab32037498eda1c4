import json
import math
import pathlib

import torch

from .__version__ import __version__
from .inference import PostEstimate, standard_errors
from .panel import BlockPartition, PanelData

__all__ = [
    "REPORT_KEYS",
    "fit_report",
    "heatmap_svg",
    "read_estimate",
    "write_heatmap",
    "write_json",
]

REPORT_KEYS = ("meta", "estimate", "partition", "inference", "diagnostics")

_PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
)


def _listify(x) -> list:
    return x.tolist() if isinstance(x, torch.Tensor) else x


def fit_report(
    panel: PanelData,
    beta: torch.Tensor,
    partition: BlockPartition,
    post: PostEstimate = None,
    meta: dict = None,
    diagnostics: dict = None,
) -> dict:
    """JSON-ready report of a fit.

    Parameters
    ----------
    panel
        Panel the fit was computed on.
    beta
        Penalized coefficient field (N, T, P).
    partition
        Recovered block structure.
    post
        Post estimate on the partition, the `inference` section is null without it.
    meta
        Run settings, merged into the `meta` section.
    diagnostics
        Solver diagnostics.

    Examples
    --------
    >>> from panel_fusion import panel, report
    >>> import torch

    >>> data = panel.PanelData(outcomes=torch.zeros(2, 2), regressors=torch.zeros(2, 2, 0))
    >>> partition = panel.BlockPartition(assignment=torch.ones(2, 2, dtype=torch.long), block_values=torch.zeros(1, 1))

    >>> document = report.fit_report(data, torch.zeros(2, 2, 1), partition, meta={"command": "fit"})
    >>> list(document)
    ['meta', 'estimate', 'partition', 'inference', 'diagnostics']

    >>> document["partition"]["n_blocks"], document["inference"]
    (1, None)

    """
    report = {
        "meta": {
            "version": __version__,
            "n_individuals": panel.n_individuals,
            "n_periods": panel.n_periods,
            "n_covariates": panel.n_covariates,
            "individuals": list(panel.individuals),
            "periods": list(panel.periods),
            **(meta or {}),
        },
        "estimate": {"beta": _listify(beta)},
        "partition": {
            "n_blocks": partition.n_blocks,
            "assignment": _listify(partition.assignment),
            "block_values": _listify(partition.block_values),
            "sizes": _listify(partition.sizes()),
        },
        "inference": None,
        "diagnostics": diagnostics or {},
    }

    if post is not None:
        report["inference"] = {
            "alpha": _listify(post.alpha),
            "standard_errors": _listify(standard_errors(post)),
            "covariance": _listify(post.covariance),
            "sigma_hat": post.sigma_hat,
        }

    return report


def _finite(value):
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(item) for item in value]
    return value


def write_json(report: dict, path: str | pathlib.Path) -> pathlib.Path:
    """Write a report.

    Floats are written with their shortest round-trip representation, which carries the
    full 17 significant digits of a double. Non-finite floats become null.

    Examples
    --------
    >>> from panel_fusion import report
    >>> import json, pathlib, tempfile

    >>> path = pathlib.Path(tempfile.mkdtemp()) / "diagnostics.json"
    >>> _ = report.write_json({"residual": float("nan"), "bounds": (0.1, float("inf"))}, path)
    >>> json.loads(path.read_text())
    {'residual': None, 'bounds': [0.1, None]}

    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_finite(report), indent=2, allow_nan=False))
    return path


def read_estimate(report: dict | str | pathlib.Path) -> PostEstimate:
    """Rebuild the post estimate stored in a fit report.

    Examples
    --------
    >>> from panel_fusion import inference, panel, report
    >>> import torch

    >>> data = panel.PanelData(
    ...     outcomes=torch.tensor([[1.0, 2.0], [3.0, 6.0]]),
    ...     regressors=torch.zeros(2, 2, 0),
    ... )
    >>> design = panel.build_design(data)
    >>> partition = panel.BlockPartition(assignment=torch.ones(2, 2, dtype=torch.long), block_values=torch.zeros(1, 1))
    >>> post = inference.post_estimate(data, design, partition)

    >>> estimate = report.read_estimate(report.fit_report(data, post.beta, partition, post=post))
    >>> torch.equal(estimate.alpha, post.alpha), estimate.sigma_hat == post.sigma_hat
    (True, True)

    """
    if not isinstance(report, dict):
        report = json.loads(pathlib.Path(report).read_text())

    if report.get("inference") is None:
        raise ValueError("The report carries no post estimate.")

    inference = report["inference"]
    alpha = torch.tensor(inference["alpha"], dtype=torch.float64)
    partition = BlockPartition(
        assignment=torch.tensor(report["partition"]["assignment"], dtype=torch.long),
        block_values=alpha,
    )
    return PostEstimate(
        partition=partition,
        alpha=alpha,
        beta=partition.expand(),
        sigma_hat=float(inference["sigma_hat"]),
        covariance=torch.tensor(inference["covariance"], dtype=torch.float64),
    )


def heatmap_svg(
    partition: BlockPartition,
    individuals: tuple = None,
    periods: tuple = None,
    cell: int = 12,
) -> str:
    """SVG heatmap of the block labels, one row per individual and one column per period.

    Examples
    --------
    >>> from panel_fusion import panel, report
    >>> import torch

    >>> partition = panel.BlockPartition(
    ...     assignment=torch.tensor([[1, 1, 2], [1, 2, 2]]),
    ...     block_values=torch.zeros(2, 1),
    ... )
    >>> svg = report.heatmap_svg(partition)

    >>> svg.count('class="cell"')
    6

    >>> svg.count('class="legend"')
    2

    """
    n_individuals, n_periods = partition.shape
    individuals = tuple(range(1, n_individuals + 1)) if individuals is None else individuals
    periods = tuple(range(1, n_periods + 1)) if periods is None else periods

    legend_top = n_individuals * cell + cell
    height = legend_top + partition.n_blocks * (cell + 4)
    width = max(n_periods * cell, 8 * cell)

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    ]
    for i in range(n_individuals):
        for t in range(n_periods):
            label = int(partition.assignment[i, t])
            lines.append(
                f'<rect class="cell" x="{t * cell}" y="{i * cell}" width="{cell}" height="{cell}" '
                f'fill="{_PALETTE[(label - 1) % len(_PALETTE)]}">'
                f"<title>i={individuals[i]} t={periods[t]} block={label}</title></rect>"
            )

    for block in range(1, partition.n_blocks + 1):
        y = legend_top + (block - 1) * (cell + 4)
        lines.append(
            f'<g class="legend"><rect x="0" y="{y}" width="{cell}" height="{cell}" '
            f'fill="{_PALETTE[(block - 1) % len(_PALETTE)]}"/>'
            f'<text x="{cell + 4}" y="{y + cell - 2}" font-size="{cell - 2}">block {block}</text></g>'
        )

    lines.append("</svg>")
    return "\n".join(lines)


def write_heatmap(
    partition: BlockPartition, path: str | pathlib.Path, panel: PanelData = None
) -> pathlib.Path:
    """Write the block heatmap, labelled with the panel's individuals and periods when given."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        heatmap_svg(
            partition,
            individuals=None if panel is None else panel.individuals,
            periods=None if panel is None else panel.periods,
        )
    )
    return path
