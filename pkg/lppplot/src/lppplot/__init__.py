"""lppplot: renders tail-curve and variance-scaling figures from lpplab CSV files.

Deliberately shares no code with the simulation package; the CSV schema is
the only interface.
"""

__version__ = "0.1.0"

from .csvio import SchemaError, TailCurveFile, VarianceFile, read_tail_file, read_variance_file
from .figures import FigureSpec, render_tail, render_variance
