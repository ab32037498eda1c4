import tqdm

__all__ = ["progress"]


def progress(X, desc: str = "", total: int = None, tqdm_bar: bool = True):
    """Iterate over X, optionally behind a tqdm progress bar.

    Examples
    --------
    >>> from panel_fusion import utils

    >>> [x * 2 for x in utils.progress(range(3), tqdm_bar=False)]
    [0, 2, 4]

    """
    if tqdm_bar:
        yield from tqdm.tqdm(X, position=0, total=total, desc=desc)
    else:
        yield from X
