"""Embedding small partial Latin squares in groups."""

__version__ = "0.1.0"
