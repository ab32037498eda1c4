from dataclasses import dataclass

import numpy as np
import torch

__all__ = ["ERROR_PRESETS", "ErrorSpec", "gen_errors", "make_generator"]


def make_generator(seed: int | np.random.SeedSequence) -> np.random.Generator:
    """PCG64 generator from an integer seed or a spawned SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@dataclass(frozen=True)
class ErrorSpec:
    """Error design of the simulated outcomes.

    Parameters
    ----------
    kind
        `homoscedastic`: e_it ~ N(0, value). `heteroscedastic`: sigma_it e_it with
        sigma_it = value (0.05 + 0.05 x_it^2)^(1/2) and e_it ~ N(0, 1).
    value
        sigma^2 for homoscedastic errors, tau for heteroscedastic errors.

    Examples
    --------
    >>> from panel_fusion import simulation

    >>> simulation.ErrorSpec.preset("hetero-2")
    ErrorSpec(kind='heteroscedastic', value=2.0)

    >>> simulation.ErrorSpec.heteroscedastic(0.0)
    Traceback (most recent call last):
    ...
    ValueError: The error parameter must be positive, got 0.0.

    """

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("homoscedastic", "heteroscedastic"):
            raise ValueError(f"Unknown error design {self.kind!r}.")
        if not self.value > 0:
            raise ValueError(f"The error parameter must be positive, got {self.value}.")
        object.__setattr__(self, "value", float(self.value))

    @classmethod
    def homoscedastic(cls, sigma2: float) -> "ErrorSpec":
        return cls(kind="homoscedastic", value=sigma2)

    @classmethod
    def heteroscedastic(cls, tau: float) -> "ErrorSpec":
        return cls(kind="heteroscedastic", value=tau)

    @classmethod
    def preset(cls, name: str) -> "ErrorSpec":
        if name not in ERROR_PRESETS:
            raise ValueError(
                f"Unknown error preset {name!r}, expected one of {sorted(ERROR_PRESETS)}."
            )
        return cls(*ERROR_PRESETS[name])

    def scale(self, x: torch.Tensor) -> torch.Tensor:
        """Standard deviation of the error of every cell."""
        x = torch.as_tensor(x, dtype=torch.float64)
        if self.kind == "homoscedastic":
            return torch.full_like(x, self.value**0.5)
        return self.value * torch.sqrt(0.05 + 0.05 * x**2)


ERROR_PRESETS = {
    "homo-0.5": ("homoscedastic", 0.5),
    "homo-1": ("homoscedastic", 1.0),
    "hetero-1": ("heteroscedastic", 1.0),
    "hetero-2": ("heteroscedastic", 2.0),
}


def gen_errors(
    x: torch.Tensor,
    spec: ErrorSpec,
    seed: int | np.random.SeedSequence | np.random.Generator,
) -> torch.Tensor:
    """Draw one error per entry of x.

    Examples
    --------
    >>> from panel_fusion import simulation
    >>> import torch

    >>> spec = simulation.ErrorSpec.heteroscedastic(2.0)
    >>> round(float(spec.scale(torch.tensor(1.0))), 5)
    0.63246

    >>> errors = simulation.gen_errors(torch.zeros(3, 4), simulation.ErrorSpec.homoscedastic(1.0), seed=0)
    >>> errors.shape, errors.dtype
    (torch.Size([3, 4]), torch.float64)

    >>> torch.equal(errors, simulation.gen_errors(torch.zeros(3, 4), simulation.ErrorSpec.homoscedastic(1.0), seed=0))
    True

    """
    generator = seed if isinstance(seed, np.random.Generator) else make_generator(seed)
    x = torch.as_tensor(x, dtype=torch.float64)
    draws = torch.from_numpy(generator.standard_normal(size=tuple(x.shape)))
    return spec.scale(x) * draws
