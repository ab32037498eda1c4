import pandas as pd

from .accuracy import percent_correct_L
from .rand import ReplicateScore

__all__ = ["summarize_replicates"]


def summarize_replicates(
    scores: dict[str, list[ReplicateScore]], L0: int
) -> pd.DataFrame:
    """Mean RMSE, Bias, Per and ERI of every estimator over the replicates.

    Examples
    --------
    >>> from panel_fusion import metrics

    >>> scores = {
    ...     "penalized": [
    ...         metrics.ReplicateScore(rmse=0.2, bias=0.1, l_hat=2, eri=1.0, eri_t=1.0, eri_n=1.0),
    ...         metrics.ReplicateScore(rmse=0.4, bias=-0.1, l_hat=3, eri=0.9, eri_t=0.8, eri_n=1.0),
    ...     ],
    ... }

    >>> metrics.summarize_replicates(scores, L0=2)[["estimator", "rmse", "per", "eri"]]
       estimator  rmse  per   eri
    0  penalized   0.3  0.5  0.95

    """
    rows = []
    for estimator, replicates in scores.items():
        n = len(replicates)
        rows.append(
            {
                "estimator": estimator,
                "replicates": n,
                "rmse": sum(s.rmse for s in replicates) / n,
                "bias": sum(s.bias for s in replicates) / n,
                "rmse_slope": _mean([s.rmse_slope for s in replicates]),
                "bias_slope": _mean([s.bias_slope for s in replicates]),
                "per": percent_correct_L([s.l_hat for s in replicates], L0=L0),
                "eri": sum(s.eri for s in replicates) / n,
                "eri_t": sum(s.eri_t for s in replicates) / n,
                "eri_n": sum(s.eri_n for s in replicates) / n,
            }
        )
    return pd.DataFrame(rows)


def _mean(values: list) -> float:
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None
