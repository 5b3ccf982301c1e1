"""Decay figures for difflab runs.

Reads the CSV series and the fits.csv / bounds.csv summaries an experiment
wrote, and renders log-log (power) or semi-log (exponential) figures with a
guide line at the summary's reference rate.  Reference values are taken from
the summaries, never recomputed here.
"""

from .plotting import PlotSpec, plot_run_dir, plot_series

__version__ = "0.1.0"
