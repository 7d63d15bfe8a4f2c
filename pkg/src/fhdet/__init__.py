"""Toeplitz and finite Wiener-Hopf determinants for Fisher-Hartwig symbols."""

__version__ = "0.1.0"
