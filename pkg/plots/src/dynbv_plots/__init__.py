"""Figure reproduction from dynbv experiment CSVs."""

from .figures import FigureSpec, SchemaError, render

__version__ = "0.1.0"
