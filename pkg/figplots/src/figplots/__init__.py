"""Static figure rendering for the transduction simulator's CSV tables."""

from .csvio import EmptyData, MissingColumn, Table, read_table, read_tables
from .render import KINDS, PlotSpec, render

__version__ = "0.1.0"

__all__ = ["EmptyData", "MissingColumn", "Table", "read_table",
           "read_tables", "KINDS", "PlotSpec", "render", "__version__"]
