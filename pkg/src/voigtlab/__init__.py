"""Fractional Navier-Stokes-Voigt numerical laboratory."""
__version__ = "0.1.0"
