import torch

from .spec import PenaltySpec

__all__ = ["prox", "prox_lasso", "prox_mcp", "prox_scad", "soft_threshold"]


def _norms(w: torch.Tensor) -> torch.Tensor:
    return torch.linalg.vector_norm(w, dim=-1, keepdim=True)


def soft_threshold(w: torch.Tensor, t: float) -> torch.Tensor:
    """Group soft-thresholding S(w, t) = (1 - t / ||w||)_+ w applied along the last dimension.

    Parameters
    ----------
    w
        Vectors stacked along the leading dimensions.
    t
        Nonnegative threshold.

    Examples
    --------
    >>> from panel_fusion import penalty

    >>> penalty.soft_threshold([3.0, 4.0], 2.5)
    tensor([1.5000, 2.0000], dtype=torch.float64)

    >>> penalty.soft_threshold([1.0, 0.0], 2.0)
    tensor([0., 0.], dtype=torch.float64)

    >>> penalty.soft_threshold([[0.0, 0.0], [0.3, -0.4]], 0.0)
    tensor([[ 0.0000,  0.0000],
            [ 0.3000, -0.4000]], dtype=torch.float64)

    """
    if t < 0:
        raise ValueError(f"The threshold must be nonnegative, got {t}.")
    w = torch.as_tensor(w, dtype=torch.float64)
    norms = _norms(w)
    scale = torch.where(
        norms > t,
        1 - t / torch.where(norms > 0, norms, torch.ones_like(norms)),
        torch.zeros_like(norms),
    )
    return scale * w


def prox_lasso(w: torch.Tensor, level: float, step: float) -> torch.Tensor:
    """Proximal operator of the group Lasso penalty: S(w, level / step).

    Examples
    --------
    >>> from panel_fusion import penalty

    >>> penalty.prox_lasso([2.0, 0.0], level=1.0, step=1.0)
    tensor([1., 0.], dtype=torch.float64)

    >>> penalty.prox_lasso([0.5, 0.0], level=1.0, step=1.0)
    tensor([0., 0.], dtype=torch.float64)

    """
    return soft_threshold(w, level / step)


def prox_scad(w: torch.Tensor, level: float, step: float, a: float = 3.7) -> torch.Tensor:
    """Proximal operator of the group SCAD penalty.

    Minimizes (step / 2) ||w - u||^2 + SCAD(||u||) over u.

    Parameters
    ----------
    w
        Vectors stacked along the leading dimensions.
    level
        Penalty level.
    step
        Augmentation parameter of the constraint the variable belongs to.
    a
        Concavity, must exceed 1 / step + 1.

    Examples
    --------
    >>> from panel_fusion import penalty

    >>> penalty.prox_scad([1.5, 0.0], level=1.0, step=1.0, a=3.7)
    tensor([0.5000, 0.0000], dtype=torch.float64)

    >>> penalty.prox_scad([3.0, 0.0], level=1.0, step=1.0, a=3.7)
    tensor([2.5882, 0.0000], dtype=torch.float64)

    >>> penalty.prox_scad([5.0, 0.0], level=1.0, step=1.0, a=3.7)
    tensor([5., 0.], dtype=torch.float64)

    >>> penalty.prox_scad([5.0, 0.0], level=1.0, step=0.5, a=3.0)
    Traceback (most recent call last):
    ...
    ValueError: SCAD requires a > 1 / step + 1 = 3.0, got a = 3.0.

    """
    if not a > 1 / step + 1:
        raise ValueError(f"SCAD requires a > 1 / step + 1 = {1 / step + 1}, got a = {a}.")
    w = torch.as_tensor(w, dtype=torch.float64)
    norms = _norms(w)
    shrink = (a - 1) * step
    return torch.where(
        norms <= level + level / step,
        soft_threshold(w, level / step),
        torch.where(
            norms <= a * level,
            soft_threshold(w, a * level / shrink) / (1 - 1 / shrink),
            w,
        ),
    )


def prox_mcp(w: torch.Tensor, level: float, step: float, a: float = 3.0) -> torch.Tensor:
    """Proximal operator of the group MCP penalty.

    Minimizes (step / 2) ||w - u||^2 + MCP(||u||) over u.

    Examples
    --------
    >>> from panel_fusion import penalty

    >>> penalty.prox_mcp([2.0, 0.0], level=1.0, step=1.0, a=3.0)
    tensor([1.5000, 0.0000], dtype=torch.float64)

    >>> penalty.prox_mcp([4.0, 0.0], level=1.0, step=1.0, a=3.0)
    tensor([4., 0.], dtype=torch.float64)

    >>> penalty.prox_mcp([0.5, 0.0], level=1.0, step=1.0, a=3.0)
    tensor([0., 0.], dtype=torch.float64)

    """
    if not a > 1 / step:
        raise ValueError(f"MCP requires a > 1 / step = {1 / step}, got a = {a}.")
    w = torch.as_tensor(w, dtype=torch.float64)
    norms = _norms(w)
    return torch.where(
        norms <= a * level,
        soft_threshold(w, level / step) / (1 - 1 / (a * step)),
        w,
    )


def prox(w: torch.Tensor, spec: PenaltySpec, step: float) -> torch.Tensor:
    """Dispatch to the proximal operator of `spec.kind`."""
    if spec.kind == "lasso":
        return prox_lasso(w, level=spec.level, step=step)
    if spec.kind == "scad":
        return prox_scad(w, level=spec.level, step=step, a=spec.concavity)
    return prox_mcp(w, level=spec.level, step=step, a=spec.concavity)
