"""Solution-set scatter plots from exported JSON/CSV files."""

from .render import load_set, plot_solution_sets

__version__ = "0.1.0"
