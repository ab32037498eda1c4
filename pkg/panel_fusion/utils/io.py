import json
import pathlib
import re

import pandas as pd
import torch

from ..panel import PanelData
from .exceptions import PanelFormatError

__all__ = ["average_periods", "export_csv", "export_instance", "ingest_csv"]


def _expected_header(n_columns: int) -> list[str]:
    return ["i", "t", "y"] + [f"z{p}" for p in range(1, n_columns - 2)]


def _labels(column: pd.Series) -> tuple[pd.Series, tuple]:
    """Dense 1-based ranks of a label column and the sorted original labels."""
    numeric = pd.to_numeric(column, errors="coerce")
    if numeric.notna().all():
        column = numeric
        if (numeric == numeric.round()).all():
            column = numeric.astype("int64")
    codes, uniques = pd.factorize(column, sort=True)
    return pd.Series(codes + 1, index=column.index), tuple(uniques.tolist())


def ingest_csv(path: str | pathlib.Path) -> PanelData:
    """Read a long-format panel file with header `i,t,y,z1,...,z{P-1}`.

    Individuals and periods are recoded to dense 1-based ranks of their sorted labels, the
    original labels are kept on the panel. Line numbers in errors count the header as line 1.

    Parameters
    ----------
    path
        CSV file, UTF-8 with a decimal point.

    Examples
    --------
    >>> from panel_fusion import utils
    >>> import tempfile, pathlib

    >>> folder = pathlib.Path(tempfile.mkdtemp())
    >>> _ = (folder / "panel.csv").write_text("i,t,y,z1\\n1,1,0.5,1\\n1,2,1.5,2\\n2,1,2.5,3\\n2,2,3.5,4\\n")

    >>> data = utils.ingest_csv(folder / "panel.csv")
    >>> data.outcomes
    tensor([[0.5000, 1.5000],
            [2.5000, 3.5000]], dtype=torch.float64)

    >>> data.regressors[..., 0]
    tensor([[1., 2.],
            [3., 4.]], dtype=torch.float64)

    >>> _ = (folder / "missing.csv").write_text("i,t,y\\n1,1,0.5\\n1,2,1.5\\n2,1,2.5\\n")
    >>> utils.ingest_csv(folder / "missing.csv")
    Traceback (most recent call last):
    ...
    panel_fusion.utils.exceptions.PanelFormatError: Missing cell (i=2, t=2).

    >>> _ = (folder / "text.csv").write_text("i,t,y\\n1,1,0.5\\n1,2,abc\\n2,1,2.5\\n2,2,1.0\\n")
    >>> utils.ingest_csv(folder / "text.csv")
    Traceback (most recent call last):
    ...
    panel_fusion.utils.exceptions.PanelFormatError: Line 3: non-numeric value 'abc' in column y.

    """
    path = pathlib.Path(path)
    if not path.exists():
        raise FileNotFoundError(f"No panel file at {path}.")

    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skipinitialspace=True
        )
    except pd.errors.ParserError as error:
        match = re.search(r"line (\d+)", str(error))
        line = int(match.group(1)) if match else None
        raise PanelFormatError(f"Ragged row: {error}", line=line) from error
    except pd.errors.EmptyDataError as error:
        raise PanelFormatError("The panel file is empty.", line=1) from error

    columns = [str(column).strip() for column in frame.columns]
    if len(columns) < 3 or columns != _expected_header(len(columns)):
        raise PanelFormatError(
            f"Header must read {','.join(_expected_header(max(len(columns), 3)))}, got {','.join(columns)}.",
            line=1,
        )
    frame.columns = columns

    if frame.empty:
        raise PanelFormatError("The panel file has no data rows.", line=2)

    short = frame.isna().any(axis=1)
    if short.any():
        position = int(short.to_numpy().argmax())
        raise PanelFormatError(
            f"Line {position + 2}: ragged row with fewer than {len(columns)} fields.",
            line=position + 2,
        )

    values = columns[2:]
    for column in ["i", "t"]:
        blank = frame[column].str.strip() == ""
        if blank.any():
            position = int(blank.to_numpy().argmax())
            raise PanelFormatError(
                f"Line {position + 2}: empty label in column {column}.",
                line=position + 2,
            )

    for column in values:
        invalid = pd.to_numeric(frame[column], errors="coerce").isna()
        if invalid.any():
            position = int(invalid.to_numpy().argmax())
            raise PanelFormatError(
                f"Line {position + 2}: non-numeric value {frame[column].iloc[position]!r} in column {column}.",
                line=position + 2,
            )

    numbers = frame[values].apply(lambda column: column.str.strip().astype(float))

    rows, individuals = _labels(frame["i"])
    cols, periods = _labels(frame["t"])

    duplicated = pd.DataFrame({"i": rows, "t": cols}).duplicated()
    if duplicated.any():
        position = int(duplicated.to_numpy().argmax())
        raise PanelFormatError(
            f"Line {position + 2}: duplicate cell (i={frame['i'].iloc[position]}, t={frame['t'].iloc[position]}).",
            line=position + 2,
            cell=(int(rows.iloc[position]), int(cols.iloc[position])),
        )

    n_individuals, n_periods = len(individuals), len(periods)
    if len(frame) != n_individuals * n_periods:
        present = set(zip(rows.tolist(), cols.tolist()))
        i, t = next(
            (i, t)
            for i in range(1, n_individuals + 1)
            for t in range(1, n_periods + 1)
            if (i, t) not in present
        )
        raise PanelFormatError(
            f"Missing cell (i={individuals[i - 1]}, t={periods[t - 1]}).", cell=(i, t)
        )

    cube = torch.zeros(n_individuals, n_periods, len(values), dtype=torch.float64)
    cube[
        torch.as_tensor(rows.to_numpy() - 1), torch.as_tensor(cols.to_numpy() - 1)
    ] = torch.as_tensor(numbers.to_numpy(), dtype=torch.float64)

    return PanelData(
        outcomes=cube[..., 0],
        regressors=cube[..., 1:],
        individuals=individuals,
        periods=periods,
    )


def export_csv(panel: PanelData, path: str | pathlib.Path) -> pathlib.Path:
    """Write a panel in the long format read by `ingest_csv`, rows in lattice order.

    Examples
    --------
    >>> from panel_fusion import panel, utils
    >>> import tempfile, pathlib, torch

    >>> _ = torch.manual_seed(0)
    >>> data = panel.PanelData(outcomes=torch.randn(3, 4), regressors=torch.randn(3, 4, 2))
    >>> path = utils.export_csv(data, pathlib.Path(tempfile.mkdtemp()) / "panel.csv")

    >>> again = utils.ingest_csv(path)
    >>> torch.equal(again.outcomes, data.outcomes), torch.equal(again.regressors, data.regressors)
    (True, True)

    """
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    n_individuals, n_periods = panel.n_individuals, panel.n_periods
    frame = pd.DataFrame(
        {
            "i": [label for label in panel.individuals for _ in range(n_periods)],
            "t": list(panel.periods) * n_individuals,
            "y": panel.outcomes.reshape(-1).tolist(),
        }
    )
    regressors = panel.regressors.reshape(n_individuals * n_periods, -1)
    for p in range(regressors.shape[1]):
        frame[f"z{p + 1}"] = regressors[:, p].tolist()

    frame.to_csv(path, index=False)
    return path


def export_instance(instance, directory: str | pathlib.Path) -> tuple[pathlib.Path, pathlib.Path]:
    """Write a simulated instance as `panel.csv` and its ground truth as `truth.json`.

    Examples
    --------
    >>> from panel_fusion import simulation, utils
    >>> import json, tempfile, pathlib, torch

    >>> instance = simulation.gen_dgp2(N=10, T=3, err=simulation.ErrorSpec.homoscedastic(0.5), seed=11)
    >>> panel_path, truth_path = utils.export_instance(instance, pathlib.Path(tempfile.mkdtemp()))

    >>> torch.equal(utils.ingest_csv(panel_path).outcomes, instance.panel.outcomes)
    True

    >>> truth = json.loads(truth_path.read_text())
    >>> truth["n_blocks"], truth["seed"]
    (3, 11)

    """
    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    panel_path = export_csv(instance.panel, directory / "panel.csv")
    truth_path = directory / "truth.json"
    truth_path.write_text(
        json.dumps(
            {
                "seed": instance.seed,
                "n_individuals": instance.panel.n_individuals,
                "n_periods": instance.panel.n_periods,
                "n_blocks": instance.truth.n_blocks,
                "assignment": instance.truth.assignment.tolist(),
                "block_values": instance.truth.block_values.tolist(),
            },
            indent=2,
        )
    )
    return panel_path, truth_path


def average_periods(frame: pd.DataFrame, width: int = 5) -> pd.DataFrame:
    """Average a long-format panel over consecutive windows of `width` periods.

    Windows follow the sorted period labels and are labelled by their first period. A
    trailing window shorter than `width` is dropped.

    Examples
    --------
    >>> from panel_fusion import utils
    >>> import pandas as pd

    >>> frame = pd.DataFrame({
    ...     "i": ["a"] * 5,
    ...     "t": [2000, 2001, 2002, 2003, 2004],
    ...     "y": [1.0, 3.0, 5.0, 7.0, 9.0],
    ... })

    >>> utils.average_periods(frame, width=2)
       i     t    y
    0  a  2000  2.0
    1  a  2002  6.0

    """
    if width < 1:
        raise ValueError(f"width must be positive, got {width}.")

    periods = sorted(frame["t"].unique())
    n_windows = len(periods) // width
    if n_windows == 0:
        raise ValueError(f"Fewer than {width} periods to average.")

    window = {
        period: periods[(position // width) * width]
        for position, period in enumerate(periods[: n_windows * width])
    }
    frame = frame[frame["t"].isin(window)].assign(t=lambda f: f["t"].map(window))
    return frame.groupby(["i", "t"], as_index=False, sort=True).mean()
