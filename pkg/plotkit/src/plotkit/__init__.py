"""Figures from cavity-HHG simulator TSV outputs."""

from .figures import render
from .spec import FigureSpec, parse_figure_spec
from .tsv import InputError, Table

__version__ = "0.1.0"
