__all__ = [
    "DegenerateFitError",
    "PanelFormatError",
    "PathError",
    "SingularBlockError",
    "SolverError",
]


class SolverError(RuntimeError):
    """Linear solver or ADMM failure.

    Parameters
    ----------
    message
        Human readable description.
    residual
        Final relative residual of the Krylov iteration, when relevant.
    iterations
        Number of Krylov iterations performed, when relevant.
    iteration
        ADMM iteration at which a non-finite iterate appeared, when relevant.

    """

    def __init__(
        self,
        message: str,
        residual: float = None,
        iterations: int = None,
        iteration: int = None,
    ) -> None:
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.iteration = iteration


class DegenerateFitError(ValueError):
    """Raised when a fit interpolates the data and the BIC is undefined."""


class SingularBlockError(ValueError):
    """Raised when a block Gram matrix cannot be inverted or degrees of freedom run out."""

    def __init__(self, message: str, block: int = None) -> None:
        super().__init__(message)
        self.block = block


class PathError(RuntimeError):
    """Raised when every point of a tuning path failed."""

    def __init__(self, message: str, failures: dict = None) -> None:
        super().__init__(message)
        self.failures = {} if failures is None else failures


class PanelFormatError(ValueError):
    """Raised when a panel file is malformed.

    Parameters
    ----------
    message
        Description of the problem.
    line
        1-based line number in the file, the header being line 1.
    cell
        1-based (i, t) cell concerned by a completeness failure.

    """

    def __init__(self, message: str, line: int = None, cell: tuple = None) -> None:
        super().__init__(message)
        self.line = line
        self.cell = cell
