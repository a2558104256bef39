"""Exact Haantjes-algebra separation of variables for the generalized Zernike family."""

__version__ = "0.1.0"
