"""Python bindings for the lrlab numerical laboratory."""

from ._lrlab import (
    BumpKind,
    Grid,
    LrlabError,
    carleman_sweep,
    export,
    run,
    sample_bumps,
    validate,
    version,
)

__version__ = version()

__all__ = [
    "BumpKind",
    "Grid",
    "LrlabError",
    "carleman_sweep",
    "export",
    "run",
    "sample_bumps",
    "validate",
    "version",
]
