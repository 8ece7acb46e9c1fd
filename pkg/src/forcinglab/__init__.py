"""Desk-scale laboratory for tree forcings, Borel codes and rank functions."""

__version__ = "0.1.0"
