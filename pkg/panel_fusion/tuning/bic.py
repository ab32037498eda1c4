import math

from ..panel import PanelData
from ..solver import FitResult
from ..utils.exceptions import DegenerateFitError

__all__ = ["bic_score", "bic_value"]


def bic_value(
    sse: float,
    n_observations: int,
    n_covariates: int,
    l_hat: int,
    c_nt: float = None,
) -> float:
    """Modified BIC: log(SSE / NT) + C_NT log(NT) / NT L P.

    Parameters
    ----------
    sse
        Sum of squared residuals of the penalized fit.
    n_observations
        N T.
    n_covariates
        P.
    l_hat
        Number of recovered blocks.
    c_nt
        Complexity constant, log(N T P) by default.

    Examples
    --------
    >>> from panel_fusion import tuning

    >>> round(tuning.bic_value(sse=100.0, n_observations=100, n_covariates=2, l_hat=1), 4)
    0.488

    >>> tuning.bic_value(sse=100.0, n_observations=100, n_covariates=2, l_hat=0)
    Traceback (most recent call last):
    ...
    ValueError: The number of blocks must be at least 1, got 0.

    >>> tuning.bic_value(sse=0.0, n_observations=100, n_covariates=2, l_hat=100)
    Traceback (most recent call last):
    ...
    panel_fusion.utils.exceptions.DegenerateFitError: The fit interpolates the data (SSE = 0), the BIC is undefined.

    """
    if l_hat < 1:
        raise ValueError(f"The number of blocks must be at least 1, got {l_hat}.")
    if sse <= 0:
        raise DegenerateFitError(
            "The fit interpolates the data (SSE = 0), the BIC is undefined."
        )
    c_nt = math.log(n_observations * n_covariates) if c_nt is None else c_nt
    return math.log(sse / n_observations) + c_nt * math.log(
        n_observations
    ) / n_observations * (l_hat * n_covariates)


def bic_score(
    fit: FitResult, panel: PanelData, l_hat: int, c_nt: float = None
) -> float:
    """Modified BIC of a penalized fit with l_hat recovered blocks."""
    return bic_value(
        sse=fit.sse,
        n_observations=panel.n_observations,
        n_covariates=panel.n_covariates,
        l_hat=l_hat,
        c_nt=c_nt,
    )
