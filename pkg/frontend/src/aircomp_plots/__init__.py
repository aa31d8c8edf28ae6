"""Chart rendering for aircomp-fa sweep results."""

from .render import GROUP_COLUMNS, PlotSpec, SchemaError, read_rows, render

__version__ = "0.1.0"

__all__ = ["GROUP_COLUMNS", "PlotSpec", "SchemaError", "read_rows", "render"]
