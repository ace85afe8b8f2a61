"""Hurwitz-move orbits, C-graphs and the ambiguity index of equipped finite groups."""

__version__ = "0.1.0"
