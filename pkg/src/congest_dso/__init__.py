"""Simulated CONGEST algorithms for excluded shortest paths, distance sensitivity
oracles and second simple shortest paths, with brute-force reference checks."""

__version__ = "0.1.0"
