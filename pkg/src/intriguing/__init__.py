"""Strongly regular graphs, partial quadrangles and their intriguing sets."""
__version__ = "0.1.0"
