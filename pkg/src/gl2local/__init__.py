"""Local harmonic analysis on GL(2) for subconvexity bounds."""

__version__ = "0.1.0"
