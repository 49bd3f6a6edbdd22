"""Twistor-line, nodal-curve and metric verification toolkit for ALE spaces."""

__version__ = "0.1.0"
