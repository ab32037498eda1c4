__all__ = [
    "inference",
    "metrics",
    "panel",
    "penalty",
    "report",
    "simulation",
    "solver",
    "tuning",
    "utils",
]
