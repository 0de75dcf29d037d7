"""Resin: asynchronous probabilistic logic compiled to reactive circuits."""

__version__ = "0.1.0"
