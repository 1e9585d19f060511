"""roadrand: synthetic road-marking labels, balancing weights, and metrics."""

__version__ = "0.1.0"
