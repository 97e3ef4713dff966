"""Schwarz reflection in a cardioid and a circumscribed circle, compared with
quadratic anti-polynomials through exact angle coding and laminations."""

__version__ = "0.1.0"
