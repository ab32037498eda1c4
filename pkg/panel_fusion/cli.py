"""Command line front end.

    panel-fusion fit --input panel.csv --lambda 0.5 --gamma 0.5 --out results/
    panel-fusion tune --input panel.csv --grid-preset empirical --workers 4 --out results/
    panel-fusion simulate --dgp 1 --n 20 --t 20 --error homo --sigma2 0.5 --seed 7 --out sim/
    panel-fusion replicate --dgp 2 --n 20 --t 20 --replicates 100 --workers 8 --out mc/
    panel-fusion test --input results/fit.json --contrast '{"difference": [1, 2]}' --out results/

Settings are read from dataclass defaults, then from the INI file given by `--config`, then
from the command line flags, each layer overriding the previous one.

"""

import argparse
import configparser
import dataclasses
import json
import pathlib
import sys

import pandas as pd
import torch

from . import inference, report, simulation, utils
from .__version__ import __version__
from .panel import build_design, build_fusion_index
from .penalty import PenaltySpec
from .solver import AdmmConfig, RidgeConfig, ridge_init, run_admm
from .tuning import GRID_PRESETS, TuningGrid, solution_path
from .utils.exceptions import (
    DegenerateFitError,
    PanelFormatError,
    PathError,
    SingularBlockError,
    SolverError,
)

__all__ = ["COMMANDS", "RunConfig", "load_config", "main", "run"]

COMMANDS = ("fit", "tune", "simulate", "replicate", "test")

SECTIONS = {
    "admm": ("psi", "phi", "tol_primal", "tol_change", "max_iter", "linear_solver"),
    "penalty": ("penalty", "lambda", "gamma", "concavity"),
    "tuning": (
        "grid_preset",
        "grid_start",
        "grid_stop",
        "grid_step",
        "criterion_constant",
        "tol_fuse",
        "workers",
    ),
    "ridge": ("lambda_star", "gamma_star"),
    "simulation": ("dgp", "n", "t", "error", "sigma2", "tau", "replicates", "seed"),
    "run": ("input", "out", "contrast", "iota", "alpha_level", "progress"),
}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Settings of one command line run.

    Examples
    --------
    >>> from panel_fusion import cli

    >>> config = cli.RunConfig(command="tune", grid_preset="custom", grid_start=0.5, grid_stop=1.0, grid_step=0.25)
    >>> config.grid().lambda_values
    (0.5, 0.75, 1.0)

    >>> cli.RunConfig(command="simulate", error="hetero", tau=2.0).error_spec()
    ErrorSpec(kind='heteroscedastic', value=2.0)

    >>> cli.RunConfig(command="fit", penalty="ridge")
    Traceback (most recent call last):
    ...
    ValueError: penalty must be one of lasso, scad, mcp, got 'ridge'.

    """

    command: str
    input: str = None
    out: str = "."
    lambda_: float = None
    gamma: float = None
    penalty: str = "scad"
    concavity: float = None
    grid_preset: str = "sim"
    grid_start: float = None
    grid_stop: float = None
    grid_step: float = None
    psi: float = 1.0
    phi: float = 1.0
    tol_primal: float = 1e-4
    tol_change: float = 1e-5
    max_iter: int = 2000
    linear_solver: str = "krylov"
    lambda_star: float = 1e-3
    gamma_star: float = 1e-3
    tol_fuse: float = 1e-6
    criterion_constant: float = None
    replicates: int = 100
    seed: int = 42
    workers: int = 1
    dgp: int = 1
    n: int = 20
    t: int = 20
    error: str = "homo"
    sigma2: float = 0.5
    tau: float = 1.0
    contrast: str = None
    iota: str = None
    alpha_level: float = 0.05
    progress: bool = True

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"command must be one of {', '.join(COMMANDS)}, got {self.command!r}.")
        if self.penalty not in ("lasso", "scad", "mcp"):
            raise ValueError(f"penalty must be one of lasso, scad, mcp, got {self.penalty!r}.")
        if self.grid_preset not in (*GRID_PRESETS, "custom"):
            raise ValueError(f"Unknown grid preset {self.grid_preset!r}.")
        if self.error not in ("homo", "hetero"):
            raise ValueError(f"error must be homo or hetero, got {self.error!r}.")
        if self.workers < 1 or self.replicates < 1:
            raise ValueError("workers and replicates must be positive.")
        if not 0 < self.alpha_level < 1:
            raise ValueError(f"alpha_level must lie in (0, 1), got {self.alpha_level}.")

    def admm_config(self) -> AdmmConfig:
        return AdmmConfig(
            psi=self.psi,
            phi=self.phi,
            max_iterations=self.max_iter,
            tol_primal=self.tol_primal,
            tol_change=self.tol_change,
            linear_solver=self.linear_solver,
        )

    def ridge_config(self) -> RidgeConfig:
        return RidgeConfig(lambda_star=self.lambda_star, gamma_star=self.gamma_star)

    def grid(self) -> TuningGrid:
        if self.grid_preset != "custom":
            return TuningGrid.preset(self.grid_preset)
        if None in (self.grid_start, self.grid_stop, self.grid_step):
            raise ValueError("A custom grid needs --grid-start, --grid-stop and --grid-step.")
        return TuningGrid.from_range(self.grid_start, self.grid_stop, self.grid_step)

    def error_spec(self) -> simulation.ErrorSpec:
        if self.error == "homo":
            return simulation.ErrorSpec.homoscedastic(self.sigma2)
        return simulation.ErrorSpec.heteroscedastic(self.tau)

    def settings(self) -> dict:
        """JSON-ready view of the run settings."""
        return {
            ("lambda" if f.name == "lambda_" else f.name): getattr(self, f.name)
            for f in dataclasses.fields(self)
        }


def _field_name(key: str) -> str:
    key = key.strip().replace("-", "_")
    return "lambda_" if key == "lambda" else key


def load_config(path: str | pathlib.Path) -> dict:
    """Read an INI settings file into RunConfig keyword arguments.

    Examples
    --------
    >>> from panel_fusion import cli
    >>> import tempfile, pathlib

    >>> path = pathlib.Path(tempfile.mkdtemp()) / "run.ini"
    >>> _ = path.write_text("[penalty]\\nlambda = 0.4\\npenalty = mcp\\n[admm]\\nmax_iter = 500\\n[run]\\nprogress = no\\n")

    >>> sorted(cli.load_config(path).items())
    [('lambda_', 0.4), ('max_iter', 500), ('penalty', 'mcp'), ('progress', False)]

    """
    path = pathlib.Path(path)
    if not path.exists():
        raise FileNotFoundError(f"No configuration file at {path}.")

    parser = configparser.ConfigParser()
    parser.read(path, encoding="utf-8")
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}

    values = {}
    for section in parser.sections():
        if section not in SECTIONS:
            raise ValueError(f"Unknown section [{section}] in {path}.")
        for key in parser[section]:
            if key not in SECTIONS[section]:
                raise ValueError(f"Unknown key {key!r} in section [{section}] of {path}.")
            name = _field_name(key)
            if types[name] is bool:
                values[name] = parser.getboolean(section, key)
            else:
                values[name] = types[name](parser.get(section, key))
    return values


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="panel-fusion",
        description="Doubly fused panel regression: latent block structures over individuals and periods.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="INI settings file.")
    common.add_argument("--input", help="Panel CSV, or fit JSON for `test`.")
    common.add_argument("--out", help="Output directory.")
    common.add_argument("--lambda", dest="lambda_", type=float, help="Individual fusion level.")
    common.add_argument("--gamma", type=float, help="Period fusion level.")
    common.add_argument("--penalty", choices=("lasso", "scad", "mcp"))
    common.add_argument("--concavity", type=float, help="Concavity of SCAD / MCP.")
    common.add_argument("--grid-preset", choices=(*GRID_PRESETS, "custom"))
    common.add_argument("--grid-start", type=float)
    common.add_argument("--grid-stop", type=float)
    common.add_argument("--grid-step", type=float)
    common.add_argument("--psi", type=float)
    common.add_argument("--phi", type=float)
    common.add_argument("--tol-primal", type=float)
    common.add_argument("--tol-change", type=float)
    common.add_argument("--max-iter", type=int)
    common.add_argument("--linear-solver", choices=("krylov", "dense"))
    common.add_argument("--lambda-star", type=float)
    common.add_argument("--gamma-star", type=float)
    common.add_argument("--tol-fuse", type=float)
    common.add_argument("--criterion-constant", type=float, help="BIC constant, log(NTP) by default.")
    common.add_argument("--replicates", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--dgp", type=int, choices=(1, 2))
    common.add_argument("--n", type=int)
    common.add_argument("--t", type=int)
    common.add_argument("--error", choices=("homo", "hetero"))
    common.add_argument("--sigma2", type=float)
    common.add_argument("--tau", type=float)
    common.add_argument("--contrast", help='Contrast as JSON: a (q, L P) matrix or {"difference": [l, m]}.')
    common.add_argument("--iota", help="JSON vector checked against the confidence region.")
    common.add_argument("--alpha-level", type=float, help="Test level tau.")
    common.add_argument("--no-progress", dest="progress", action="store_false")

    commands = parser.add_subparsers(dest="command", required=True)
    for command, description in (
        ("fit", "Single (lambda, gamma) fit."),
        ("tune", "Solution path over the tuning grid and BIC selection."),
        ("simulate", "Write a simulated instance and its ground truth."),
        ("replicate", "Monte Carlo replicates and their aggregate accuracy."),
        ("test", "Wald chi-square test on a stored fit."),
    ):
        commands.add_parser(command, parents=[common], help=description)

    return parser


def _build(arguments: dict) -> RunConfig:
    values = {}
    if "config" in arguments:
        values.update(load_config(arguments.pop("config")))
    values.update(arguments)
    return RunConfig(**values)


def _load_panel(config: RunConfig):
    if config.input is None:
        raise ValueError(f"`{config.command}` needs --input.")
    return utils.ingest_csv(config.input)


def _post(panel, design, partition) -> tuple:
    try:
        return inference.post_estimate(panel, design, partition), None
    except SingularBlockError as error:
        return None, str(error)


def _write_table(post, out: pathlib.Path, names: list) -> None:
    if post is not None:
        inference.coefficient_table(post, names=names).to_csv(
            out / "coefficients.csv", index=False
        )


def _names(panel) -> list:
    return ["intercept"] + [f"z{p}" for p in range(1, panel.n_covariates)]


def cmd_fit(config: RunConfig) -> list[pathlib.Path]:
    """Single fit at the given (lambda, gamma), its blocks and post estimates."""
    if config.lambda_ is None or config.gamma is None:
        raise ValueError("`fit` needs --lambda and --gamma.")

    out = pathlib.Path(config.out)
    panel = _load_panel(config)
    design = build_design(panel)
    idx = build_fusion_index(panel.n_individuals, panel.n_periods)
    admm = config.admm_config()

    gamma_spec = PenaltySpec(kind=config.penalty, level=config.gamma, concavity=config.concavity)
    init = ridge_init(panel, design, config=config.ridge_config(), solver=admm, idx=idx)
    fit = run_admm(
        panel,
        design,
        lambda_spec=gamma_spec.with_level(config.lambda_),
        gamma_spec=gamma_spec,
        config=admm,
        init=init,
        idx=idx,
    )
    partition = inference.recover_blocks(fit.state, idx, tol_fuse=config.tol_fuse)
    post, post_error = _post(panel, design, partition)

    document = report.fit_report(
        panel,
        fit.beta,
        partition,
        post=post,
        meta={"command": "fit", "settings": config.settings()},
        diagnostics={**fit.diagnostics(), "objective": fit.objective, "sse": fit.sse, "post_error": post_error},
    )
    written = [report.write_json(document, out / "fit.json")]
    _write_table(post, out, _names(panel))
    return written


def _records(frame: pd.DataFrame) -> list[dict]:
    return frame.astype(object).where(frame.notna(), None).to_dict(orient="records")


def cmd_tune(config: RunConfig) -> list[pathlib.Path]:
    """Solution path, BIC surface and the selected fit."""
    out = pathlib.Path(config.out)
    panel = _load_panel(config)
    design = build_design(panel)
    idx = build_fusion_index(panel.n_individuals, panel.n_periods)

    path = solution_path(
        panel,
        design,
        config.grid(),
        penalty_kind=config.penalty,
        config=config.admm_config(),
        concavity=config.concavity,
        ridge=config.ridge_config(),
        tol_fuse=config.tol_fuse,
        c_nt=config.criterion_constant,
        idx=idx,
        workers=config.workers,
        tqdm_bar=config.progress,
    )
    best = path.best
    post, post_error = _post(panel, design, best.partition)
    surface = path.surface()

    document = report.fit_report(
        panel,
        best.fit.beta,
        best.partition,
        post=post,
        meta={
            "command": "tune",
            "settings": config.settings(),
            "selected": {"gamma": best.gamma, "lambda": best.lambda_, "bic": best.bic},
        },
        diagnostics={
            **best.fit.diagnostics(),
            "post_error": post_error,
            "failed_points": int(surface["error"].notna().sum()),
            "path": _records(surface),
        },
    )

    out.mkdir(parents=True, exist_ok=True)
    surface.to_csv(out / "bic_surface.csv", index=False)
    _write_table(post, out, _names(panel))
    return [
        report.write_json(document, out / "tune.json"),
        report.write_heatmap(best.partition, out / "blocks.svg", panel=panel),
        out / "bic_surface.csv",
    ]


def cmd_simulate(config: RunConfig) -> list[pathlib.Path]:
    """Simulated instance as panel CSV and ground truth JSON."""
    instance = simulation.generate(
        config.dgp, N=config.n, T=config.t, err=config.error_spec(), seed=config.seed
    )
    return list(utils.export_instance(instance, config.out))


def cmd_replicate(config: RunConfig) -> list[pathlib.Path]:
    """Monte Carlo replicates aggregated per estimator."""
    out = pathlib.Path(config.out)
    outcomes = simulation.run_replicates(
        dgp=config.dgp,
        N=config.n,
        T=config.t,
        err=config.error_spec(),
        replicates=config.replicates,
        seed=config.seed,
        grid=config.grid(),
        penalty_kind=config.penalty,
        config=config.admm_config(),
        ridge=config.ridge_config(),
        tol_fuse=config.tol_fuse,
        c_nt=config.criterion_constant,
        workers=config.workers,
        tqdm_bar=config.progress,
    )
    L0 = len(simulation.DGP1_ALPHA if config.dgp == 1 else simulation.DGP2_ALPHA)
    table = simulation.summarize(outcomes, L0=L0)

    scores = pd.DataFrame(
        [
            {
                "seed": outcome.seed,
                "estimator": estimator,
                "gamma": outcome.selected[0],
                "lambda": outcome.selected[1],
                **dataclasses.asdict(score),
            }
            for outcome in outcomes
            for estimator, score in outcome.scores.items()
        ]
    )

    out.mkdir(parents=True, exist_ok=True)
    table.to_csv(out / "replicates.csv", index=False)
    scores.to_csv(out / "replicate_scores.csv", index=False)
    return [
        report.write_json(
            {"meta": {"command": "replicate", "version": __version__, "settings": config.settings()}, "summary": _records(table)},
            out / "replicates.json",
        ),
        out / "replicates.csv",
        out / "replicate_scores.csv",
    ]


def _hypothesis(contrast: str, estimate) -> inference.HypothesisSpec:
    if contrast is None:
        raise ValueError("`test` needs --contrast.")
    candidate = pathlib.Path(contrast)
    spec = json.loads(candidate.read_text() if candidate.is_file() else contrast)

    if isinstance(spec, dict):
        pair = spec.get("difference")
        if (
            set(spec) != {"difference"}
            or not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(block, int) and not isinstance(block, bool) for block in pair)
        ):
            raise ValueError(
                f'A difference contrast reads {{"difference": [l, m]}} with two block numbers, got {contrast}.'
            )
        return inference.difference_contrast(
            estimate.n_blocks, estimate.n_covariates, first=pair[0], second=pair[1]
        )

    if not isinstance(spec, list):
        raise ValueError(f"The contrast must be a JSON matrix or a difference, got {contrast}.")
    try:
        hypothesis = inference.HypothesisSpec(contrast=spec)
    except (TypeError, RuntimeError) as error:
        raise ValueError(f"The contrast must hold numbers only: {error}") from error
    if hypothesis.contrast.shape[1] != estimate.n_blocks * estimate.n_covariates:
        raise ValueError(
            f"The contrast needs {estimate.n_blocks * estimate.n_covariates} columns, got {hypothesis.contrast.shape[1]}."
        )
    return hypothesis


def cmd_test(config: RunConfig) -> list[pathlib.Path]:
    """Wald chi-square test of a linear hypothesis on a stored fit."""
    if config.input is None:
        raise ValueError("`test` needs --input pointing at a fit report.")

    estimate = report.read_estimate(config.input)
    hypothesis = _hypothesis(config.contrast, estimate)
    statistic, dof, p_value = inference.chi_square_test(estimate, hypothesis)

    result = {
        "statistic": statistic,
        "dof": dof,
        "p_value": p_value,
        "alpha_level": config.alpha_level,
        "reject": p_value < config.alpha_level,
        "contrast": hypothesis.contrast.tolist(),
    }
    if config.iota is not None:
        iota = torch.tensor(json.loads(config.iota), dtype=torch.float64)
        result["iota"] = iota.tolist()
        result["region_contains_iota"] = inference.confidence_region_contains(
            estimate, hypothesis, iota=iota, tau=config.alpha_level
        )

    return [report.write_json(result, pathlib.Path(config.out) / "test.json")]


_RUNNERS = {
    "fit": cmd_fit,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "replicate": cmd_replicate,
    "test": cmd_test,
}


def run(config: RunConfig) -> list[pathlib.Path]:
    """Dispatch a run and return the written artifacts."""
    return _RUNNERS[config.command](config)


def _error_document(error: Exception) -> dict:
    document = {"error": type(error).__name__, "message": str(error)}
    for attribute in ("residual", "iterations", "iteration", "block", "line", "cell"):
        if getattr(error, attribute, None) is not None:
            document[attribute] = getattr(error, attribute)
    if isinstance(error, PathError):
        document["failures"] = [
            {"gamma": gamma, "lambda": lambda_, "error": message}
            for (gamma, lambda_), message in sorted(error.failures.items())
        ]
    return document


def main(argv: list[str] = None) -> int:
    """Entry point of `panel-fusion`. Returns 0 when every artifact was written.

    Examples
    --------
    >>> from panel_fusion import cli
    >>> import json, tempfile, pathlib

    >>> out = pathlib.Path(tempfile.mkdtemp())
    >>> cli.main(["fit", "--input", str(out / "absent.csv"), "--lambda", "1", "--gamma", "1", "--out", str(out)])
    1

    >>> json.loads((out / "error.json").read_text())["error"]
    'FileNotFoundError'

    """
    arguments = vars(_parser().parse_args(argv))
    out = pathlib.Path(arguments.get("out", "."))

    try:
        config = _build(arguments)
        out = pathlib.Path(config.out)
        written = run(config)
    except (
        SolverError,
        DegenerateFitError,
        SingularBlockError,
        PathError,
        PanelFormatError,
        ValueError,
        KeyError,
        OSError,
    ) as error:
        document = _error_document(error)
        print(json.dumps(document), file=sys.stderr)
        try:
            report.write_json(document, out / "error.json")
        except OSError:
            pass
        return 1

    for path in written:
        print(path)
    return 0
