"""Quantitative models of classical architectural refinements.

Stylobate surface reconstruction, column entasis and fluting, perceptibility
thresholds, rain drainage and buckling estimates, corner-column visibility,
and deterministic SVG figures, with a single command-line entry point.
"""

__version__ = "0.1.0"
