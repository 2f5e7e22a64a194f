"""Run folders, artifact writers and plot helpers."""

from .base import CSV_FLOAT_FORMAT, RunReporter
from .helpers import PlotHelper

__all__ = ["CSV_FLOAT_FORMAT", "RunReporter", "PlotHelper"]
