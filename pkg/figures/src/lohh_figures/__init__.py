"""Regenerates runtime, learning-period, and operator-usage charts from
the TSV files the lohh command line tool writes.  The only coupling to the
experiment code is the file format.
"""

import matplotlib

matplotlib.use("Agg")

from .io import AlignmentError, ColumnError, Table, load_table
from .render import FigureSpec, build_figure, render

__version__ = "0.1.0"

__all__ = [
    "AlignmentError",
    "ColumnError",
    "FigureSpec",
    "Table",
    "build_figure",
    "load_table",
    "render",
]
