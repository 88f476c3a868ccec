"""Figure rendering for simulator sweep CSVs."""

from .render import (
    FIGURE_KINDS,
    REQUIRED_COLUMNS,
    EmptySelectionError,
    FiggenError,
    FigureRequest,
    MissingColumnError,
    build_figure,
    read_rows,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "FIGURE_KINDS",
    "REQUIRED_COLUMNS",
    "EmptySelectionError",
    "FiggenError",
    "FigureRequest",
    "MissingColumnError",
    "build_figure",
    "read_rows",
    "render",
]
