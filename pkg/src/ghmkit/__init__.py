"""Numerical toolkit for saddle spectra, the generalized Henon map family,
its Bogdanov-Takens bifurcation structure, return-map rescaling near a
homoclinic tangency with complex leading multipliers, and historic /
wandering-domain diagnostics."""

__version__ = "0.1.0"
