from dataclasses import dataclass

__all__ = ["GRID_PRESETS", "TuningGrid", "grid_range"]


def grid_range(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic range, rounded to absorb floating point drift.

    Examples
    --------
    >>> from panel_fusion import tuning

    >>> tuning.grid_range(0.2, 1.0, 0.2)
    (0.2, 0.4, 0.6, 0.8, 1.0)

    """
    if step <= 0 or stop < start:
        raise ValueError("Expected start <= stop and a positive step.")
    n = int(round((stop - start) / step)) + 1
    return tuple(round(start + k * step, 10) for k in range(n))


GRID_PRESETS = {
    "sim": (0.1, 1.5, 0.1),
    "empirical": (0.2, 3.0, 0.2),
}


@dataclass(frozen=True)
class TuningGrid:
    """Grid of (gamma, lambda) values, both strictly ascending and nonnegative.

    Examples
    --------
    >>> from panel_fusion import tuning

    >>> grid = tuning.TuningGrid.preset("sim")
    >>> len(grid.gamma_values), grid.gamma_values[0], grid.gamma_values[-1]
    (15, 0.1, 1.5)

    >>> grid = tuning.TuningGrid.preset("empirical")
    >>> len(grid.lambda_values), grid.lambda_values[-1]
    (15, 3.0)

    >>> tuning.TuningGrid(gamma_values=(0.2, 0.1), lambda_values=(0.1,))
    Traceback (most recent call last):
    ...
    ValueError: gamma_values must be nonempty, nonnegative and strictly ascending.

    """

    gamma_values: tuple
    lambda_values: tuple

    def __post_init__(self) -> None:
        for name in ("gamma_values", "lambda_values"):
            values = tuple(float(v) for v in getattr(self, name))
            if (
                not values
                or values[0] < 0
                or any(b <= a for a, b in zip(values, values[1:]))
            ):
                raise ValueError(
                    f"{name} must be nonempty, nonnegative and strictly ascending."
                )
            object.__setattr__(self, name, values)

    @property
    def size(self) -> int:
        return len(self.gamma_values) * len(self.lambda_values)

    @classmethod
    def from_range(cls, start: float, stop: float, step: float) -> "TuningGrid":
        values = grid_range(start, stop, step)
        return cls(gamma_values=values, lambda_values=values)

    @classmethod
    def preset(cls, name: str) -> "TuningGrid":
        if name not in GRID_PRESETS:
            raise ValueError(
                f"Unknown grid preset {name!r}, expected one of {sorted(GRID_PRESETS)}."
            )
        return cls.from_range(*GRID_PRESETS[name])
