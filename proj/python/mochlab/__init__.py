"""Python access to the mochlab library (numpy arrays in, dicts out)."""

from ._mochlab import (
    Error,
    ensemble,
    gamma0,
    inflation_run,
    norms,
    rhs,
    scaling_sweep,
    solve,
)

__all__ = [
    "Error",
    "ensemble",
    "gamma0",
    "inflation_run",
    "norms",
    "rhs",
    "scaling_sweep",
    "solve",
]
