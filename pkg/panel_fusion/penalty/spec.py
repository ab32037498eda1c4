from dataclasses import dataclass

import torch

__all__ = ["DEFAULT_CONCAVITY", "PenaltySpec", "penalty_value"]

DEFAULT_CONCAVITY = {"lasso": None, "scad": 3.7, "mcp": 3.0}


@dataclass(frozen=True)
class PenaltySpec:
    """Penalty applied to the norm of a pairwise difference.

    Parameters
    ----------
    kind
        One of `lasso`, `scad`, `mcp`.
    level
        Penalty level, lambda for individual fusion or gamma for period fusion.
    concavity
        Concavity parameter a. Defaults to 3.7 for SCAD and 3.0 for MCP, ignored by Lasso.

    Examples
    --------
    >>> from panel_fusion import penalty

    >>> penalty.PenaltySpec(kind="scad", level=0.5)
    PenaltySpec(kind='scad', level=0.5, concavity=3.7)

    >>> penalty.PenaltySpec(kind="mcp", level=1.0).validate(step=0.2)
    Traceback (most recent call last):
    ...
    ValueError: MCP requires a > 1 / step = 5.0, got a = 3.0.

    """

    kind: str
    level: float
    concavity: float = None

    def __post_init__(self) -> None:
        kind = self.kind.lower()
        if kind not in DEFAULT_CONCAVITY:
            raise ValueError(
                f"Unknown penalty {self.kind!r}, expected one of {sorted(DEFAULT_CONCAVITY)}."
            )
        if self.level < 0:
            raise ValueError(f"Penalty level must be nonnegative, got {self.level}.")

        concavity = (
            DEFAULT_CONCAVITY[kind] if self.concavity is None else float(self.concavity)
        )
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "level", float(self.level))
        object.__setattr__(self, "concavity", concavity)

    def validate(self, step: float) -> "PenaltySpec":
        """Check the concavity against the augmentation parameter of the owning constraint."""
        if step <= 0:
            raise ValueError(f"The step must be positive, got {step}.")
        if self.kind == "scad" and not self.concavity > 1 / step + 1:
            raise ValueError(
                f"SCAD requires a > 1 / step + 1 = {1 / step + 1}, got a = {self.concavity}."
            )
        if self.kind == "mcp" and not self.concavity > 1 / step:
            raise ValueError(
                f"MCP requires a > 1 / step = {1 / step}, got a = {self.concavity}."
            )
        return self

    def with_level(self, level: float) -> "PenaltySpec":
        return PenaltySpec(kind=self.kind, level=level, concavity=self.concavity)


def penalty_value(kappa: torch.Tensor | float, spec: PenaltySpec) -> torch.Tensor:
    """Penalty evaluated at a nonnegative norm kappa.

    Parameters
    ----------
    kappa
        Nonnegative norms, any shape.
    spec
        Penalty.

    Examples
    --------
    >>> from panel_fusion import penalty

    >>> mcp = penalty.PenaltySpec(kind="mcp", level=1.0, concavity=3.0)
    >>> penalty.penalty_value([0.0, 1.0, 3.0, 10.0], mcp)
    tensor([0.0000, 0.8333, 1.5000, 1.5000], dtype=torch.float64)

    >>> scad = penalty.PenaltySpec(kind="scad", level=1.0, concavity=3.7)
    >>> penalty.penalty_value([0.0, 0.5, 3.7, 8.0], scad)
    tensor([0.0000, 0.5000, 2.3500, 2.3500], dtype=torch.float64)

    >>> penalty.penalty_value(2.0, penalty.PenaltySpec(kind="lasso", level=0.5))
    tensor(1., dtype=torch.float64)

    """
    kappa = torch.as_tensor(kappa, dtype=torch.float64)
    level, a = spec.level, spec.concavity

    if spec.kind == "lasso":
        return level * kappa

    if spec.kind == "mcp":
        return torch.where(
            kappa <= a * level,
            level * kappa - kappa**2 / (2 * a),
            kappa.new_tensor(a * level**2 / 2),
        )

    return torch.where(
        kappa <= level,
        level * kappa,
        torch.where(
            kappa <= a * level,
            (2 * a * level * kappa - kappa**2 - level**2) / (2 * (a - 1)),
            kappa.new_tensor(level**2 * (a + 1) / 2),
        ),
    )
